#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kglink/numeric/tensor.hpp"

namespace kglink::numeric {

/// A named trainable tensor. Rows flagged in `frozen_rows` are never updated
/// (pre-trained embedding rows); an empty mask means every row trains.
struct Parameter {
  std::string name;
  Tensor value;
  std::vector<std::uint8_t> frozen_rows;

  bool row_frozen(std::size_t row) const { return row < frozen_rows.size() && frozen_rows[row] != 0; }
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam. Moments are kept per parameter position, so step()
/// must always see the same parameter list in the same order.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  /// Applies one update from the gradients currently stored in `params`.
  /// Throws std::logic_error if a parameter carries no gradient buffer.
  void step(std::span<Parameter> params);

  std::int64_t steps_taken() const noexcept { return t_; }
  const AdamConfig& config() const noexcept { return config_; }

 private:
  AdamConfig config_;
  std::int64_t t_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

/// Single Adam update of `value` for step t >= 1, with explicit moment buffers.
void adam_update(std::span<double> value, std::span<const double> grad, std::span<double> m, std::span<double> v,
                 const AdamConfig& config, std::int64_t t);

void zero_grads(std::span<Parameter> params);

/// Multiplies every gradient by `factor` (used to average over a batch).
void scale_grads(std::span<Parameter> params, double factor);

}  // namespace kglink::numeric
