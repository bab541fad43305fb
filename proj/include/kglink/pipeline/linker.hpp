#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kglink/kg/index.hpp"
#include "kglink/model/seq2seq.hpp"

namespace kglink::pipeline {

struct PipelineConfig {
  double threshold = 0.85;
  std::size_t candidate_limit = 64;
  std::size_t max_tokens = 25;
  std::size_t disambiguator_max_source = 64;

  /// Throws ConfigError on an out-of-range value.
  void validate() const;
  kg::SearchOptions search() const { return {threshold, candidate_limit}; }
};

enum class LinkMode {
  pipeline,  // extractor -> search -> disambiguator
  top1,      // extractor -> search, first hit wins
  baseline,  // one model maps text straight to entity labels
};

const char* to_string(LinkMode mode);
/// Throws ConfigError for an unknown name.
LinkMode parse_link_mode(std::string_view name);

/// A surface form as emitted by the extractor; the token span is present
/// when the form could be located in the source.
struct SurfaceForm {
  std::string surface;
  std::optional<std::size_t> start;
  std::optional<std::size_t> end;

  bool operator==(const SurfaceForm&) const = default;
};

struct LinkPrediction {
  std::string surface;  // empty in baseline mode
  std::optional<std::size_t> start;
  std::optional<std::size_t> end;
  std::string qid;
  double candidate_score = 0.0;
  double decode_score = 0.0;

  bool operator==(const LinkPrediction&) const = default;
};

/// Splits decoded tokens on <sep> and places every segment at the leftmost
/// run of not yet claimed source tokens with the same ids under `vocab`
/// (so an <unk> segment token matches any out-of-vocabulary source token).
/// The surface of a placed segment is the original source text; an
/// unplaced segment keeps its decoded tokens and gets no span.
std::vector<SurfaceForm> place_surface_forms(const std::vector<std::string>& decoded,
                                             const std::vector<std::string>& source,
                                             const text::Vocabulary& vocab);

std::vector<SurfaceForm> extract_surface_forms(const model::Seq2SeqModel& extractor,
                                               const std::vector<std::string>& tokens);

std::vector<kg::CandidateHit> generate_candidates(const kg::KGIndex& index, std::string_view surface,
                                                  const PipelineConfig& config);

struct Disambiguation {
  std::string qid;
  double candidate_score = 0.0;
  double decode_score = 0.0;
  bool fell_back = false;  // decoded label unknown or outside the candidates
};

/// None for no candidates; the candidate itself when there is only one;
/// otherwise the entity whose label the model decodes, falling back to the
/// first (best-ranked) candidate.
std::optional<Disambiguation> disambiguate(const model::Seq2SeqModel& disambiguator, std::string_view surface,
                                           const std::vector<kg::CandidateHit>& candidates, const kg::KGIndex& index,
                                           const PipelineConfig& config);

/// A loaded index plus the models a mode needs. Immutable after
/// construction; link() may run concurrently.
class Linker {
 public:
  /// `first` is the extractor (pipeline, top1) or the baseline model;
  /// `disambiguator` is used by pipeline mode only.
  Linker(kg::KGIndex index, LinkMode mode, std::optional<model::Seq2SeqModel> first,
         std::optional<model::Seq2SeqModel> disambiguator, PipelineConfig config = {});

  struct Paths {
    std::filesystem::path index;
    std::filesystem::path extractor;      // or the baseline checkpoint
    std::filesystem::path disambiguator;  // pipeline mode only
  };
  /// Throws ArtifactError for a missing file and ParseError for a corrupt one.
  static Linker load(const Paths& paths, LinkMode mode, PipelineConfig config = {});

  std::vector<LinkPrediction> link(std::string_view text) const;

  const kg::KGIndex& index() const noexcept { return index_; }
  LinkMode mode() const noexcept { return mode_; }
  const PipelineConfig& config() const noexcept { return config_; }

 private:
  std::vector<LinkPrediction> link_baseline(const std::vector<std::string>& tokens) const;

  kg::KGIndex index_;
  LinkMode mode_;
  std::optional<model::Seq2SeqModel> first_;
  std::optional<model::Seq2SeqModel> disambiguator_;
  PipelineConfig config_;
};

/// {"text": ..., "predictions": [{"surface", "start", "end", "qid", "candidate_score", "decode_score"}]}
std::string predictions_json(std::string_view text, const std::vector<LinkPrediction>& predictions);

}  // namespace kglink::pipeline
