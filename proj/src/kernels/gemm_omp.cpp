#include <omp.h>

#include <cstdint>

#include "kglink/kernels/gemm.hpp"

namespace kglink::kernels::omp {

int max_threads() { return omp_get_max_threads(); }

void gemm_nn(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t k, std::size_t n) {
  const auto rows = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(static)
  for (std::int64_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double* crow = c.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      const double* brow = b.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemm_nt(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t n, std::size_t k) {
  // Rows of C are usually 1 here (a single decoder step), so split the flat
  // (i, j) space instead.
  const auto cells = static_cast<std::int64_t>(m * k);
#pragma omp parallel for schedule(static)
  for (std::int64_t cell = 0; cell < cells; ++cell) {
    const auto i = static_cast<std::size_t>(cell) / k;
    const auto j = static_cast<std::size_t>(cell) % k;
    const double* arow = a.data() + i * n;
    const double* brow = b.data() + j * n;
    double acc = 0.0;
    for (std::size_t p = 0; p < n; ++p) acc += arow[p] * brow[p];
    c[i * k + j] += acc;
  }
}

void gemm_tn(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t k, std::size_t n) {
  const auto outs = static_cast<std::int64_t>(k);
#pragma omp parallel for schedule(static)
  for (std::int64_t pp = 0; pp < outs; ++pp) {
    const auto p = static_cast<std::size_t>(pp);
    double* crow = c.data() + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double av = a[i * k + p];
      if (av == 0.0) continue;
      const double* brow = b.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

}  // namespace kglink::kernels::omp
