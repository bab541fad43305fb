#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "kglink/numeric/tensor.hpp"
#include "kglink/text/vocabulary.hpp"

namespace kglink::text {

/// Word vectors for one vocabulary: a [V x d] matrix plus the rows that came
/// from a pre-trained file and must not be updated.
struct EmbeddingTable {
  numeric::Tensor matrix;
  std::vector<std::uint8_t> frozen_rows;
  std::size_t dim = 0;
  std::size_t matched = 0;
  /// matched / (non-reserved vocabulary size); 0 when the vocabulary has no
  /// non-reserved tokens.
  double coverage = 0.0;
};

inline constexpr double kEmbeddingInitScale = 0.1;

/// Every row uniform in [-scale, scale] from `seed`; nothing frozen.
EmbeddingTable random_embeddings(const Vocabulary& vocab, std::size_t dim, std::uint64_t seed,
                                 double scale = kEmbeddingInitScale);

/// Loads a GloVe-style text file ("token v1 ... vd" per line). Tokens present
/// in `vocab` take the file vector (frozen when `freeze`); every other row,
/// reserved ones included, keeps its seeded random value and stays trainable.
///
/// Throws ConfigError when the file's vector width differs from `dim`, and
/// ParseError (with line number) for a line whose width differs from the
/// first line's or that holds a non-numeric value.
EmbeddingTable load_pretrained(const std::filesystem::path& path, const Vocabulary& vocab, std::size_t dim,
                               std::uint64_t seed, bool freeze = true);

}  // namespace kglink::text
