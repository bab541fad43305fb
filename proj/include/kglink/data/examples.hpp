#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kglink/data/corpus.hpp"
#include "kglink/kg/index.hpp"
#include "kglink/model/trainer.hpp"
#include "kglink/text/vocabulary.hpp"

// Token-level training examples for the two seq2seq tasks. Special tokens
// appear under their reserved names ("<sep>", "</s>"), so a Vocabulary maps
// them to the reserved ids.

namespace kglink::data {

inline const std::string kSepToken = "<sep>";
inline const std::string kEosToken = "</s>";

struct TokenExample {
  std::vector<std::string> source;
  std::vector<std::string> target;  // ends with kEosToken
};

model::SequencePair encode(const TokenExample& example, const text::Vocabulary& source_vocab,
                           const text::Vocabulary& target_vocab);

/// Source: the sentence tokens. Target: each gold surface form in textual
/// order, separated by <sep>, then </s>. A sentence without links maps to [</s>].
TokenExample extractor_example(const AnnotatedSentence& sentence);

/// Text-to-entities baseline without background knowledge. Source: the
/// sentence tokens. Target: the gold entities' label tokens in textual order,
/// separated by <sep>, then </s>. Links whose entity is not in `index` are left out.
TokenExample baseline_example(const AnnotatedSentence& sentence, const kg::KGIndex& index);

struct Candidate {
  std::string id;
  std::string label;
  double score;
};

/// Search hits resolved to entity labels, in search order.
std::vector<Candidate> candidates_for(const kg::KGIndex& index, const std::string& surface,
                                      const kg::SearchOptions& search = {});

/// surface <sep> label_1 <sep> label_2 ... cut at `max_len` tokens. Whole
/// candidates are appended while they fit; the surface and the first
/// candidate are always present (shortened if need be). Returns the number
/// of candidates included.
std::size_t disambiguator_source(const std::vector<std::string>& surface_tokens,
                                 const std::vector<Candidate>& candidates, std::size_t max_len,
                                 std::vector<std::string>& out);

struct DisambiguatorOptions {
  std::size_t max_source_len = 64;
  /// Training only: make sure the gold entity is among the encoded candidates.
  bool inject_gold = false;
  kg::SearchOptions search;
};

struct DisambiguatorExample {
  TokenExample tokens;  // target: gold label tokens + </s>
  std::string surface;
  std::string gold_id;
  std::vector<std::string> candidate_ids;  // the candidates present in the source, in order
};

struct DisambiguatorStats {
  std::size_t links = 0;
  std::size_t examples = 0;
  std::size_t gold_not_in_kg = 0;   // skipped: no label to emit
  std::size_t gold_injected = 0;    // gold absent from the search hits
  std::size_t gold_relocated = 0;   // gold cut off by truncation and moved forward
  std::size_t no_candidates = 0;    // evaluation examples with an empty candidate list
};

/// One example per gold link whose entity exists in the index.
std::vector<DisambiguatorExample> disambiguator_examples(const std::vector<AnnotatedSentence>& sentences,
                                                         const kg::KGIndex& index,
                                                         const DisambiguatorOptions& options,
                                                         DisambiguatorStats* stats = nullptr);

struct CorpusProfile {
  std::size_t sentences = 0;
  std::size_t links = 0;
  std::size_t links_in_kg = 0;
  std::size_t exact_label_match = 0;  // normalized surface == normalized gold label
  double mean_tokens = 0.0;
  double mean_links = 0.0;
};

/// Corpus statistics; label comparisons use `index` when given.
CorpusProfile profile(const std::vector<AnnotatedSentence>& sentences, const kg::KGIndex* index = nullptr);

}  // namespace kglink::data
