#include "kglink/text/tokenizer.hpp"

#include "kglink/text/utf8.hpp"

namespace kglink::text {

namespace {

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' || c == 0xA0;
}

bool is_split_punct(char32_t c) { return c < 0x80 && kSplitPunctuation.find(static_cast<char>(c)) != std::string_view::npos; }

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  const auto cps = decode_utf8(text);
  std::vector<Token> out;
  auto emit = [&](std::size_t b, std::size_t e) {
    out.push_back({std::string(text.substr(cps[b].byte_begin, cps[e - 1].byte_end - cps[b].byte_begin)), b, e});
  };
  std::size_t i = 0;
  while (i < cps.size()) {
    if (is_space(cps[i].value)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && !is_space(cps[j].value)) ++j;
    // [i, j) is one whitespace-delimited chunk.
    std::size_t lo = i, hi = j;
    while (lo < hi && is_split_punct(cps[lo].value)) {
      emit(lo, lo + 1);
      ++lo;
    }
    std::size_t tail = hi;
    while (tail > lo && is_split_punct(cps[tail - 1].value)) --tail;
    if (lo < tail) emit(lo, tail);
    for (std::size_t k = tail; k < hi; ++k) emit(k, k + 1);
    i = j;
  }
  return out;
}

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> out;
  for (Token& t : tokenize(text)) out.push_back(std::move(t.text));
  return out;
}

std::string join(const std::vector<std::string>& tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

}  // namespace kglink::text
