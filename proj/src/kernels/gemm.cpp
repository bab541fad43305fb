#include "kglink/kernels/gemm.hpp"

namespace kglink::kernels {

namespace {

bool use_openmp(Backend backend, std::size_t work) {
  switch (backend) {
    case Backend::serial:
      return false;
    case Backend::openmp:
      return true;
    case Backend::automatic:
      break;
  }
  return work >= kParallelWorkThreshold && omp::max_threads() > 1;
}

}  // namespace

void gemm_nn(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t k, std::size_t n, Backend backend) {
  if (use_openmp(backend, m * k * n)) {
    omp::gemm_nn(a, b, c, m, k, n);
  } else {
    serial::gemm_nn(a, b, c, m, k, n);
  }
}

void gemm_nt(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t n, std::size_t k, Backend backend) {
  if (use_openmp(backend, m * k * n)) {
    omp::gemm_nt(a, b, c, m, n, k);
  } else {
    serial::gemm_nt(a, b, c, m, n, k);
  }
}

void gemm_tn(std::span<const double> a, std::span<const double> b, std::span<double> c,
             std::size_t m, std::size_t k, std::size_t n, Backend backend) {
  if (use_openmp(backend, m * k * n)) {
    omp::gemm_tn(a, b, c, m, k, n);
  } else {
    serial::gemm_tn(a, b, c, m, k, n);
  }
}

}  // namespace kglink::kernels
