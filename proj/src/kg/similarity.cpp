#include "kglink/kg/similarity.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace kglink::kg {

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

double edit_similarity(std::u32string_view a, std::u32string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

double dice(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return 2.0 * static_cast<double>(common) / static_cast<double>(a.size() + b.size());
}

double similarity(const ScoredText& a, const ScoredText& b) {
  if (a.chars == b.chars) return 1.0;
  return std::max(dice(a.tokens, b.tokens), edit_similarity(a.chars, b.chars));
}

namespace serial {

void score_candidates(const ScoredText& query, std::span<const ScoredText> texts,
                      std::span<const std::uint32_t> candidates, std::span<double> scores) {
  for (std::size_t i = 0; i < candidates.size(); ++i) scores[i] = similarity(query, texts[candidates[i]]);
}

}  // namespace serial

void score_candidates(const ScoredText& query, std::span<const ScoredText> texts,
                      std::span<const std::uint32_t> candidates, std::span<double> scores,
                      kernels::Backend backend) {
  if (scores.size() != candidates.size()) throw std::invalid_argument("score buffer size differs from candidate count");
  const bool parallel = backend == kernels::Backend::openmp ||
                        (backend == kernels::Backend::automatic && candidates.size() >= kParallelScoreThreshold &&
                         kernels::omp::max_threads() > 1);
  if (parallel) {
    omp::score_candidates(query, texts, candidates, scores);
  } else {
    serial::score_candidates(query, texts, candidates, scores);
  }
}

}  // namespace kglink::kg
