#include <cstdint>

#include "kglink/kg/similarity.hpp"

namespace kglink::kg::omp {

void score_candidates(const ScoredText& query, std::span<const ScoredText> texts,
                      std::span<const std::uint32_t> candidates, std::span<double> scores) {
  const auto n = static_cast<std::int64_t>(candidates.size());
  // Edit distances vary a lot with string length.
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    scores[k] = similarity(query, texts[candidates[k]]);
  }
}

}  // namespace kglink::kg::omp
