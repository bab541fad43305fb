#pragma once

#include <cstddef>
#include <span>

// Dense row-major GEMM kernels. Every kernel accumulates into C (C += ...).
//
// Two implementations exist for each product: a serial reference and an
// OpenMP version that parallelizes over rows of C. Both walk the reduction
// index in the same order, so their results are bitwise identical.

namespace kglink::kernels {

enum class Backend { serial, openmp, automatic };

namespace serial {
// C[m x n] += A[m x k] * B[k x n]
void gemm_nn(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t k, std::size_t n);
// C[m x k] += A[m x n] * B[k x n]^T
void gemm_nt(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t n, std::size_t k);
// C[k x n] += A[m x k]^T * B[m x n]
void gemm_tn(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t k, std::size_t n);
}  // namespace serial

namespace omp {
void gemm_nn(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t k, std::size_t n);
void gemm_nt(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t n, std::size_t k);
void gemm_tn(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t k, std::size_t n);

/// Threads OpenMP would use for a parallel region started here.
int max_threads();
}  // namespace omp

// Dispatchers. `automatic` picks OpenMP only when more than one thread is
// available and the product is large enough to amortize the fork.
void gemm_nn(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t k, std::size_t n, Backend backend = Backend::automatic);
void gemm_nt(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t n, std::size_t k, Backend backend = Backend::automatic);
void gemm_tn(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t k, std::size_t n, Backend backend = Backend::automatic);

/// Work size (m*k*n) from which `automatic` switches to OpenMP.
inline constexpr std::size_t kParallelWorkThreshold = std::size_t{1} << 16;

}  // namespace kglink::kernels
