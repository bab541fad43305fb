#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kglink/kernels/gemm.hpp"

// String similarity used to score a query against indexed names:
//   score = max(dice(token multisets), 1 - levenshtein / max length)
// over normalized text. Identical strings score exactly 1.

namespace kglink::kg {

/// A normalized string in the form the scoring kernels consume: its code
/// points and its token ids sorted ascending (a multiset).
struct ScoredText {
  std::u32string chars;
  std::vector<std::uint32_t> tokens;
};

std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
double edit_similarity(std::u32string_view a, std::u32string_view b);
/// 2|A ∩ B| / (|A| + |B|) over sorted multisets; 1 when both are empty.
double dice(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);
double similarity(const ScoredText& a, const ScoredText& b);

namespace serial {
/// scores[i] = similarity(query, texts[candidates[i]])
void score_candidates(const ScoredText& query, std::span<const ScoredText> texts,
                      std::span<const std::uint32_t> candidates, std::span<double> scores);
}  // namespace serial

namespace omp {
void score_candidates(const ScoredText& query, std::span<const ScoredText> texts,
                      std::span<const std::uint32_t> candidates, std::span<double> scores);
}  // namespace omp

/// Candidate count from which `automatic` scores in parallel.
inline constexpr std::size_t kParallelScoreThreshold = 2048;

void score_candidates(const ScoredText& query, std::span<const ScoredText> texts,
                      std::span<const std::uint32_t> candidates, std::span<double> scores,
                      kernels::Backend backend = kernels::Backend::automatic);

}  // namespace kglink::kg
