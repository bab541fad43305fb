#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "kglink/numeric/optim.hpp"
#include "kglink/numeric/tape.hpp"

namespace kglink::numeric {

struct GradCheckOptions {
  double epsilon = 1e-5;
  /// Coordinates sampled per parameter; 0 checks every coordinate.
  std::size_t coords_per_param = 0;
  std::uint64_t seed = 1;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  std::size_t coordinates_checked = 0;
};

/// Compares tape gradients against central differences.
///
/// `forward` must be deterministic and return a scalar. The error of one
/// coordinate is |analytic - numeric| / max(1, |analytic|, |numeric|).
/// Throws std::domain_error when the loss is not finite.
GradCheckResult grad_check(const std::function<Tensor(Tape&)>& forward, std::span<Parameter> params,
                           const GradCheckOptions& options = {});

}  // namespace kglink::numeric
