#include "kglink/data/examples.hpp"

#include <algorithm>
#include <stdexcept>

#include "kglink/kg/normalize.hpp"

namespace kglink::data {

model::SequencePair encode(const TokenExample& example, const text::Vocabulary& source_vocab,
                           const text::Vocabulary& target_vocab) {
  return {source_vocab.encode(example.source), target_vocab.encode(example.target)};
}

TokenExample extractor_example(const AnnotatedSentence& sentence) {
  TokenExample ex{sentence.words(), {}};
  for (const auto& link : sentence.links) {
    if (!ex.target.empty()) ex.target.push_back(kSepToken);
    for (auto& w : sentence.words(link.start, link.end)) ex.target.push_back(std::move(w));
  }
  ex.target.push_back(kEosToken);
  return ex;
}

TokenExample baseline_example(const AnnotatedSentence& sentence, const kg::KGIndex& index) {
  TokenExample ex{sentence.words(), {}};
  for (const auto& link : sentence.links) {
    const auto* entity = index.find(link.qid);
    if (!entity) continue;
    if (!ex.target.empty()) ex.target.push_back(kSepToken);
    for (auto& w : text::tokenize_words(entity->label)) ex.target.push_back(std::move(w));
  }
  ex.target.push_back(kEosToken);
  return ex;
}

std::vector<Candidate> candidates_for(const kg::KGIndex& index, const std::string& surface,
                                      const kg::SearchOptions& search) {
  std::vector<Candidate> out;
  for (auto& hit : index.search(surface, search)) out.push_back({hit.id, index.find(hit.id)->label, hit.score});
  return out;
}

std::size_t disambiguator_source(const std::vector<std::string>& surface_tokens,
                                 const std::vector<Candidate>& candidates, std::size_t max_len,
                                 std::vector<std::string>& out) {
  if (max_len < 3) throw std::invalid_argument("disambiguator source limit must be at least 3 tokens");
  out = surface_tokens;
  if (candidates.empty()) {
    if (out.size() > max_len) out.resize(max_len);
    return 0;
  }
  // Room for "<sep> x" after the surface.
  if (out.size() + 2 > max_len) out.resize(max_len - 2);

  std::size_t included = 0;
  for (const auto& c : candidates) {
    const auto label = text::tokenize_words(c.label);
    if (out.size() + 1 + label.size() <= max_len) {
      out.push_back(kSepToken);
      out.insert(out.end(), label.begin(), label.end());
      ++included;
      continue;
    }
    if (included == 0) {
      out.push_back(kSepToken);
      const std::size_t room = max_len > out.size() ? max_len - out.size() : 0;
      out.insert(out.end(), label.begin(), label.begin() + static_cast<std::ptrdiff_t>(std::min(room, label.size())));
      ++included;
    }
    break;
  }
  return included;
}

std::vector<DisambiguatorExample> disambiguator_examples(const std::vector<AnnotatedSentence>& sentences,
                                                         const kg::KGIndex& index,
                                                         const DisambiguatorOptions& options,
                                                         DisambiguatorStats* stats) {
  DisambiguatorStats st;
  std::vector<DisambiguatorExample> out;
  for (const auto& sentence : sentences) {
    for (const auto& link : sentence.links) {
      ++st.links;
      const kg::EntityRecord* gold = index.find(link.qid);
      if (!gold) {
        ++st.gold_not_in_kg;
        continue;
      }
      auto candidates = candidates_for(index, link.surface, options.search);
      const auto is_gold = [&](const Candidate& c) { return c.id == gold->id; };
      if (options.inject_gold && std::none_of(candidates.begin(), candidates.end(), is_gold)) {
        candidates.push_back({gold->id, gold->label, 0.0});
        ++st.gold_injected;
      }
      if (candidates.empty()) ++st.no_candidates;

      DisambiguatorExample ex;
      ex.surface = link.surface;
      ex.gold_id = gold->id;
      const auto surface_tokens = sentence.words(link.start, link.end);
      std::size_t included = disambiguator_source(surface_tokens, candidates, options.max_source_len, ex.tokens.source);
      if (options.inject_gold) {
        // Move the gold entity forward until it survives the cut. Slot 0 is
        // always kept, so this terminates.
        bool moved = false;
        for (;;) {
          const auto pos = static_cast<std::size_t>(std::find_if(candidates.begin(), candidates.end(), is_gold) -
                                                    candidates.begin());
          if (pos < included) break;
          const Candidate g = candidates[pos];
          candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pos));
          candidates.insert(candidates.begin() + static_cast<std::ptrdiff_t>(included - 1), g);
          included = disambiguator_source(surface_tokens, candidates, options.max_source_len, ex.tokens.source);
          moved = true;
        }
        if (moved) ++st.gold_relocated;
      }
      for (std::size_t i = 0; i < included; ++i) ex.candidate_ids.push_back(candidates[i].id);
      ex.tokens.target = text::tokenize_words(gold->label);
      ex.tokens.target.push_back(kEosToken);
      out.push_back(std::move(ex));
      ++st.examples;
    }
  }
  if (stats) *stats = st;
  return out;
}

CorpusProfile profile(const std::vector<AnnotatedSentence>& sentences, const kg::KGIndex* index) {
  CorpusProfile p;
  std::size_t tokens = 0;
  for (const auto& s : sentences) {
    ++p.sentences;
    tokens += s.tokens.size();
    for (const auto& l : s.links) {
      ++p.links;
      if (!index) continue;
      if (const auto* e = index->find(l.qid)) {
        ++p.links_in_kg;
        if (kg::normalize(e->label) == kg::normalize(l.surface)) ++p.exact_label_match;
      }
    }
  }
  if (p.sentences) {
    p.mean_tokens = static_cast<double>(tokens) / static_cast<double>(p.sentences);
    p.mean_links = static_cast<double>(p.links) / static_cast<double>(p.sentences);
  }
  return p;
}

}  // namespace kglink::data
