#include "kglink/data/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "kglink/errors.hpp"
#include "kglink/text/utf8.hpp"

namespace kglink::data {

namespace {

using nlohmann::json;

std::size_t offset_field(const json& a, const char* key, std::size_t line_number) {
  const auto it = a.find(key);
  if (it == a.end() || !it->is_number_integer() || it->get<std::int64_t>() < 0)
    throw ParseError(std::string("annotation field '") + key + "' must be a non-negative integer", line_number);
  return it->get<std::size_t>();
}

std::string string_field(const json& a, const char* key, std::size_t line_number) {
  const auto it = a.find(key);
  if (it == a.end() || !it->is_string())
    throw ParseError(std::string("field '") + key + "' must be a string", line_number);
  return it->get<std::string>();
}

}  // namespace

std::vector<std::string> AnnotatedSentence::words() const { return words(0, tokens.size()); }

std::vector<std::string> AnnotatedSentence::words(std::size_t begin, std::size_t end) const {
  std::vector<std::string> out;
  for (std::size_t i = begin; i < end && i < tokens.size(); ++i) out.push_back(tokens[i].text);
  return out;
}

CorpusStats& CorpusStats::operator+=(const CorpusStats& o) {
  lines += o.lines;
  sentences += o.sentences;
  truncated_sentences += o.truncated_sentences;
  annotations += o.annotations;
  kept += o.kept;
  dropped_misaligned += o.dropped_misaligned;
  dropped_truncated += o.dropped_truncated;
  return *this;
}

std::optional<AnnotatedSentence> parse_record(std::string_view line, std::size_t line_number,
                                              const CorpusOptions& options, CorpusStats& stats) {
  if (line.find_first_not_of(" \t\r") == std::string_view::npos) return std::nullopt;
  json record;
  try {
    record = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line_number);
  }
  if (!record.is_object()) throw ParseError("record is not a JSON object", line_number);

  AnnotatedSentence s;
  s.text = string_field(record, "text", line_number);
  auto all_tokens = text::tokenize(s.text);
  const auto text_u32 = text::to_u32(s.text);

  struct Pending {
    std::size_t start, end;
    std::string qid;
  };
  std::vector<Pending> aligned;
  const auto anns = record.find("annotations");
  if (anns != record.end() && !anns->is_array()) throw ParseError("'annotations' must be an array", line_number);
  const std::size_t total = anns == record.end() ? 0 : anns->size();
  stats.annotations += total;
  for (std::size_t k = 0; k < total; ++k) {
    const json& a = (*anns)[k];
    if (!a.is_object()) throw ParseError("annotation is not an object", line_number);
    const std::size_t start = offset_field(a, "start", line_number);
    const std::size_t end = offset_field(a, "end", line_number);
    const std::string surface = string_field(a, "surface", line_number);
    std::string qid = string_field(a, "qid", line_number);
    if (qid.empty()) throw ParseError("annotation has an empty qid", line_number);

    const auto first = std::find_if(all_tokens.begin(), all_tokens.end(), [&](const auto& t) { return t.begin == start; });
    const auto last = std::find_if(all_tokens.begin(), all_tokens.end(), [&](const auto& t) { return t.end == end; });
    const bool consistent = start < end && end <= text_u32.size() &&
                            text::to_utf8(std::u32string_view(text_u32).substr(start, end - start)) == surface;
    if (!consistent || first == all_tokens.end() || last == all_tokens.end() || last < first) {
      ++stats.dropped_misaligned;
      continue;
    }
    aligned.push_back({static_cast<std::size_t>(first - all_tokens.begin()),
                       static_cast<std::size_t>(last - all_tokens.begin()) + 1, std::move(qid)});
  }

  std::stable_sort(aligned.begin(), aligned.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  std::size_t covered = 0;
  for (auto& p : aligned) {
    if (p.end > options.max_tokens) {
      ++stats.dropped_truncated;
      continue;
    }
    if (p.start < covered) {
      ++stats.dropped_misaligned;
      continue;
    }
    covered = p.end;
    s.links.push_back({p.start, p.end, "", std::move(p.qid)});
  }
  if (all_tokens.size() > options.max_tokens) {
    all_tokens.resize(options.max_tokens);
    ++stats.truncated_sentences;
  }
  s.tokens = std::move(all_tokens);
  for (auto& l : s.links) l.surface = text::join(s.words(l.start, l.end));
  stats.kept += s.links.size();
  ++stats.sentences;
  return s;
}

CorpusStats for_each_sentence(std::istream& in, const CorpusOptions& options,
                              const std::function<void(AnnotatedSentence&&)>& sink) {
  CorpusStats stats;
  std::string line;
  while (std::getline(in, line)) {
    ++stats.lines;
    if (auto s = parse_record(line, stats.lines, options, stats)) sink(std::move(*s));
  }
  return stats;
}

std::vector<AnnotatedSentence> parse_corpus(std::istream& in, const CorpusOptions& options, CorpusStats* stats) {
  std::vector<AnnotatedSentence> out;
  const auto st = for_each_sentence(in, options, [&](AnnotatedSentence&& s) { out.push_back(std::move(s)); });
  if (stats) *stats = st;
  return out;
}

std::vector<AnnotatedSentence> parse_corpus(const std::filesystem::path& path, const CorpusOptions& options,
                                            CorpusStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError("cannot open corpus " + path.string());
  return parse_corpus(in, options, stats);
}

std::string format_record(const AnnotatedSentence& sentence) {
  json anns = json::array();
  const auto text_u32 = text::to_u32(sentence.text);
  for (const auto& l : sentence.links) {
    const std::size_t b = sentence.tokens.at(l.start).begin, e = sentence.tokens.at(l.end - 1).end;
    anns.push_back({{"start", b},
                    {"end", e},
                    {"surface", text::to_utf8(std::u32string_view(text_u32).substr(b, e - b))},
                    {"qid", l.qid}});
  }
  json record = {{"text", sentence.text}, {"annotations", anns}};
  return record.dump();
}

std::pair<std::vector<AnnotatedSentence>, std::vector<AnnotatedSentence>> split_corpus(
    std::vector<AnnotatedSentence> sentences, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split ratio must lie strictly between 0 and 1");
  std::vector<std::size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto cut = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(sentences.size())));
  std::pair<std::vector<AnnotatedSentence>, std::vector<AnnotatedSentence>> out;
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < cut ? out.first : out.second).push_back(std::move(sentences[order[i]]));
  return out;
}

}  // namespace kglink::data
