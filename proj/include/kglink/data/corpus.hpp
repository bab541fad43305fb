#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kglink/text/tokenizer.hpp"

// Annotated corpus: JSON lines of
//   {"text": "...", "annotations": [{"start": s, "end": e, "surface": "...", "qid": "Q.."}]}
// with start/end counted in code points of `text` (half-open).

namespace kglink::data {

/// A gold entity mention over tokens [start, end).
struct GoldLink {
  std::size_t start;
  std::size_t end;
  std::string surface;  // the span's tokens joined by single spaces
  std::string qid;

  bool operator==(const GoldLink&) const = default;
};

struct AnnotatedSentence {
  std::string text;
  std::vector<text::Token> tokens;  // at most max_tokens
  std::vector<GoldLink> links;      // sorted by start, non-overlapping

  std::vector<std::string> words() const;
  std::vector<std::string> words(std::size_t begin, std::size_t end) const;

  bool operator==(const AnnotatedSentence&) const = default;
};

struct CorpusOptions {
  std::size_t max_tokens = 25;
};

/// Annotation bookkeeping: kept + dropped_misaligned + dropped_truncated == annotations.
struct CorpusStats {
  std::size_t lines = 0;
  std::size_t sentences = 0;
  std::size_t truncated_sentences = 0;
  std::size_t annotations = 0;
  std::size_t kept = 0;
  std::size_t dropped_misaligned = 0;  // off token boundaries, inconsistent surface, or overlapping
  std::size_t dropped_truncated = 0;   // beyond the token cut

  CorpusStats& operator+=(const CorpusStats& o);
};

/// nullopt for a blank line. Throws ParseError with `line_number` on a
/// structurally invalid record.
std::optional<AnnotatedSentence> parse_record(std::string_view line, std::size_t line_number,
                                              const CorpusOptions& options, CorpusStats& stats);

/// Calls `sink` for every sentence in input order without holding the corpus.
CorpusStats for_each_sentence(std::istream& in, const CorpusOptions& options,
                              const std::function<void(AnnotatedSentence&&)>& sink);

std::vector<AnnotatedSentence> parse_corpus(std::istream& in, const CorpusOptions& options = {},
                                            CorpusStats* stats = nullptr);
/// Throws ArtifactError when the file cannot be opened.
std::vector<AnnotatedSentence> parse_corpus(const std::filesystem::path& path, const CorpusOptions& options = {},
                                            CorpusStats* stats = nullptr);

/// One corpus line holding the sentence's text and its kept links; parsing
/// it again yields the same sentence.
std::string format_record(const AnnotatedSentence& sentence);

/// Seeded shuffle, then the first floor(ratio * n) sentences train and the
/// rest test. Requires 0 < ratio < 1.
std::pair<std::vector<AnnotatedSentence>, std::vector<AnnotatedSentence>> split_corpus(
    std::vector<AnnotatedSentence> sentences, double ratio, std::uint64_t seed);

}  // namespace kglink::data
