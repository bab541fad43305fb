#include "kglink/pipeline/linker.hpp"

#include <algorithm>

#include <json.hpp>

#include "kglink/data/examples.hpp"
#include "kglink/errors.hpp"
#include "kglink/kg/normalize.hpp"
#include "kglink/model/checkpoint.hpp"
#include "kglink/text/tokenizer.hpp"

namespace kglink::pipeline {

namespace {

// Decoded tokens with the bookkeeping ids removed; <sep> and <unk> stay.
std::vector<std::string> decoded_tokens(const model::Seq2SeqModel& m, const std::vector<int>& ids) {
  std::vector<std::string> out;
  for (int id : ids) {
    if (id == text::kPad || id == text::kSos || id == text::kEos) continue;
    out.push_back(m.target_vocab.token(id));
  }
  return out;
}

std::vector<std::vector<std::string>> split_on_sep(const std::vector<std::string>& tokens) {
  std::vector<std::vector<std::string>> segments(1);
  for (const auto& t : tokens) {
    if (t == data::kSepToken) {
      segments.emplace_back();
    } else {
      segments.back().push_back(t);
    }
  }
  std::erase_if(segments, [](const auto& s) { return s.empty(); });
  return segments;
}

std::vector<std::string> clipped(std::vector<std::string> tokens, std::size_t limit) {
  if (tokens.size() > limit) tokens.resize(limit);
  return tokens;
}

void check_task(const model::Seq2SeqModel& m, const std::filesystem::path& path, const std::string& expected) {
  if (m.task != expected)
    throw ConfigError("checkpoint " + path.string() + " holds a '" + m.task + "' model, expected '" + expected + "'");
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("threshold must lie in (0, 1]");
  if (candidate_limit == 0) throw ConfigError("candidate_limit must be positive");
  if (max_tokens == 0) throw ConfigError("max_tokens must be positive");
  if (disambiguator_max_source < 3) throw ConfigError("disambiguator source limit must be at least 3");
}

const char* to_string(LinkMode mode) {
  switch (mode) {
    case LinkMode::pipeline:
      return "pipeline";
    case LinkMode::top1:
      return "top1";
    case LinkMode::baseline:
      return "baseline";
  }
  return "?";
}

LinkMode parse_link_mode(std::string_view name) {
  for (auto m : {LinkMode::pipeline, LinkMode::top1, LinkMode::baseline})
    if (name == to_string(m)) return m;
  throw ConfigError("unknown link mode '" + std::string(name) + "' (expected pipeline, top1 or baseline)");
}

std::vector<SurfaceForm> place_surface_forms(const std::vector<std::string>& decoded,
                                             const std::vector<std::string>& source,
                                             const text::Vocabulary& vocab) {
  const auto source_ids = vocab.encode(source);
  std::vector<bool> used(source.size(), false);
  std::vector<SurfaceForm> out;
  for (const auto& segment : split_on_sep(decoded)) {
    const auto ids = vocab.encode(segment);
    std::optional<std::size_t> at;
    for (std::size_t p = 0; !at && p + ids.size() <= source.size(); ++p) {
      bool ok = true;
      for (std::size_t k = 0; ok && k < ids.size(); ++k) ok = !used[p + k] && source_ids[p + k] == ids[k];
      if (ok) at = p;
    }
    if (!at) {
      out.push_back({text::join(segment), std::nullopt, std::nullopt});
      continue;
    }
    std::fill(used.begin() + static_cast<std::ptrdiff_t>(*at), used.begin() + static_cast<std::ptrdiff_t>(*at + ids.size()),
              true);
    const std::vector<std::string> span(source.begin() + static_cast<std::ptrdiff_t>(*at),
                                        source.begin() + static_cast<std::ptrdiff_t>(*at + ids.size()));
    out.push_back({text::join(span), *at, *at + ids.size()});
  }
  return out;
}

std::vector<SurfaceForm> extract_surface_forms(const model::Seq2SeqModel& extractor,
                                               const std::vector<std::string>& tokens) {
  const auto source = clipped(tokens, extractor.config.max_source_len);
  if (source.empty()) return {};
  const auto result = model::greedy_decode(extractor, extractor.source_vocab.encode(source));
  return place_surface_forms(decoded_tokens(extractor, result.ids), source, extractor.source_vocab);
}

std::vector<kg::CandidateHit> generate_candidates(const kg::KGIndex& index, std::string_view surface,
                                                  const PipelineConfig& config) {
  return index.search(surface, config.search());
}

std::optional<Disambiguation> disambiguate(const model::Seq2SeqModel& disambiguator, std::string_view surface,
                                           const std::vector<kg::CandidateHit>& candidates, const kg::KGIndex& index,
                                           const PipelineConfig& config) {
  if (candidates.empty()) return std::nullopt;
  if (candidates.size() == 1) return Disambiguation{candidates[0].id, candidates[0].score, 0.0, false};

  std::vector<data::Candidate> labelled;
  for (const auto& c : candidates) labelled.push_back({c.id, index.find(c.id)->label, c.score});
  std::vector<std::string> source;
  data::disambiguator_source(text::tokenize_words(surface), labelled,
                             std::min(config.disambiguator_max_source, disambiguator.config.max_source_len), source);
  const auto result = model::greedy_decode(disambiguator, disambiguator.source_vocab.encode(source));
  const std::string label = kg::normalize(text::join(decoded_tokens(disambiguator, result.ids)));

  // A candidate carrying the decoded label wins (in rank order); otherwise
  // the global owner of that name, if it is a candidate.
  auto pick = std::find_if(labelled.begin(), labelled.end(),
                           [&](const data::Candidate& c) { return kg::normalize(c.label) == label; });
  if (pick == labelled.end() && !label.empty()) {
    if (const auto owner = index.label_to_id(label))
      pick = std::find_if(labelled.begin(), labelled.end(), [&](const data::Candidate& c) { return c.id == *owner; });
  }
  if (pick == labelled.end()) return Disambiguation{candidates[0].id, candidates[0].score, result.mean_log_prob, true};
  return Disambiguation{pick->id, pick->score, result.mean_log_prob, false};
}

Linker::Linker(kg::KGIndex index, LinkMode mode, std::optional<model::Seq2SeqModel> first,
               std::optional<model::Seq2SeqModel> disambiguator, PipelineConfig config)
    : index_(std::move(index)),
      mode_(mode),
      first_(std::move(first)),
      disambiguator_(std::move(disambiguator)),
      config_(config) {
  config_.validate();
  if (!first_) throw ConfigError(std::string(to_string(mode_)) + " mode needs a model");
  if (mode_ == LinkMode::pipeline && !disambiguator_) throw ConfigError("pipeline mode needs a disambiguator model");
}

Linker Linker::load(const Paths& paths, LinkMode mode, PipelineConfig config) {
  config.validate();
  auto index = kg::KGIndex::load(paths.index);
  auto first = model::load_checkpoint(paths.extractor);
  check_task(first, paths.extractor, mode == LinkMode::baseline ? "baseline" : "extractor");
  std::optional<model::Seq2SeqModel> second;
  if (mode == LinkMode::pipeline) {
    second = model::load_checkpoint(paths.disambiguator);
    check_task(*second, paths.disambiguator, "disambiguator");
  }
  return Linker(std::move(index), mode, std::move(first), std::move(second), config);
}

std::vector<LinkPrediction> Linker::link(std::string_view text) const {
  const auto tokens = clipped(text::tokenize_words(text), config_.max_tokens);
  if (tokens.empty()) return {};
  if (mode_ == LinkMode::baseline) return link_baseline(tokens);

  std::vector<LinkPrediction> out;
  for (const auto& form : extract_surface_forms(*first_, tokens)) {
    if (form.surface.empty()) continue;
    const auto hits = generate_candidates(index_, form.surface, config_);
    if (hits.empty()) continue;
    if (mode_ == LinkMode::top1) {
      out.push_back({form.surface, form.start, form.end, hits[0].id, hits[0].score, 0.0});
      continue;
    }
    if (auto d = disambiguate(*disambiguator_, form.surface, hits, index_, config_))
      out.push_back({form.surface, form.start, form.end, d->qid, d->candidate_score, d->decode_score});
  }
  return out;
}

std::vector<LinkPrediction> Linker::link_baseline(const std::vector<std::string>& tokens) const {
  const auto source = clipped(tokens, first_->config.max_source_len);
  const auto result = model::greedy_decode(*first_, first_->source_vocab.encode(source));
  std::vector<LinkPrediction> out;
  for (const auto& segment : split_on_sep(decoded_tokens(*first_, result.ids))) {
    if (const auto id = index_.label_to_id(text::join(segment)))
      out.push_back({"", std::nullopt, std::nullopt, *id, 0.0, result.mean_log_prob});
  }
  return out;
}

std::string predictions_json(std::string_view text, const std::vector<LinkPrediction>& predictions) {
  using nlohmann::json;
  json preds = json::array();
  for (const auto& p : predictions) {
    preds.push_back({{"surface", p.surface},
                     {"start", p.start ? json(*p.start) : json(nullptr)},
                     {"end", p.end ? json(*p.end) : json(nullptr)},
                     {"qid", p.qid},
                     {"candidate_score", p.candidate_score},
                     {"decode_score", p.decode_score}});
  }
  return json{{"text", std::string(text)}, {"predictions", preds}}.dump(-1, ' ', false, json::error_handler_t::replace);
}

}  // namespace kglink::pipeline
