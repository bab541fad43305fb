#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace kglink::text {

/// A token with its position in the source text, in code points (half-open).
struct Token {
  std::string text;
  std::size_t begin;
  std::size_t end;

  bool operator==(const Token&) const = default;
};

/// Characters peeled off word edges into standalone tokens.
inline constexpr std::string_view kSplitPunctuation = ".,;:!?()\"";

/// Whitespace split, then each leading or trailing character from
/// kSplitPunctuation becomes its own token. Inner punctuation (hyphens,
/// apostrophes) stays inside the word. Case is preserved.
std::vector<Token> tokenize(std::string_view text);

/// Token strings only.
std::vector<std::string> tokenize_words(std::string_view text);

std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");

}  // namespace kglink::text
