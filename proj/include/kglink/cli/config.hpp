#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "kglink/pipeline/linker.hpp"
#include "kglink/pipeline/training.hpp"

namespace kglink::cli {

/// Every tunable of a run, as one flat JSON object. Keys not listed here are
/// rejected with ConfigError.
struct RunConfig {
  double threshold = 0.85;
  std::size_t candidate_limit = 64;
  std::size_t max_tokens = 25;
  std::size_t max_decode_len = 25;
  std::size_t disambiguator_max_source = 64;
  std::size_t embed_dim = 300;
  std::size_t hidden = 300;
  double learning_rate = 1e-3;
  std::size_t epochs = 10;
  std::size_t batch_size = 1;
  std::uint64_t seed = 42;
  std::size_t vocab_size = 50000;
  std::size_t min_count = 1;
  double split_ratio = 0.8;
  std::string mode = "pipeline";
  std::string embeddings;  // optional pretrained vectors
  std::string index;
  std::string extractor;
  std::string disambiguator;
  std::string baseline;

  /// Overrides one key from its textual form ("0.9", "true", "path").
  void set(std::string_view key, std::string_view value);
  /// Applies every key of a JSON object document.
  void merge_json(std::string_view document);
  void merge_file(const std::filesystem::path& path);
  /// Throws ConfigError on an out-of-range value.
  void validate() const;

  std::string to_json() const;

  pipeline::PipelineConfig pipeline() const;
  pipeline::LinkMode link_mode() const;
  /// Training setup for "extractor", "disambiguator" or "baseline".
  pipeline::TaskTrainingConfig training(const std::string& task) const;
};

}  // namespace kglink::cli
