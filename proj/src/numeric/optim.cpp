#include "kglink/numeric/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace kglink::numeric {

void adam_update(std::span<double> value, std::span<const double> grad, std::span<double> m, std::span<double> v,
                 const AdamConfig& config, std::int64_t t) {
  if (t < 1) throw std::invalid_argument("adam_update: step must be >= 1");
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < value.size(); ++i) {
    m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * grad[i];
    v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
    const double mhat = m[i] / c1;
    const double vhat = v[i] / c2;
    value[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.epsilon);
  }
}

void Adam::step(std::span<Parameter> params) {
  for (const Parameter& p : params) {
    if (!p.value.has_grad()) throw std::logic_error("adam: parameter '" + p.name + "' has no gradient");
  }
  if (m_.empty()) {
    for (const Parameter& p : params) {
      m_.emplace_back(p.value.size(), 0.0);
      v_.emplace_back(p.value.size(), 0.0);
    }
  }
  if (m_.size() != params.size()) throw std::logic_error("adam: parameter list changed between steps");
  ++t_;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = params[k];
    if (p.value.size() != m_[k].size()) throw std::logic_error("adam: parameter '" + p.name + "' changed size");
    if (p.frozen_rows.empty()) {
      adam_update(p.value.data(), p.value.grad(), m_[k], v_[k], config_, t_);
      continue;
    }
    const std::size_t width = p.value.cols();
    for (std::size_t r = 0; r < p.value.rows(); ++r) {
      if (p.row_frozen(r)) continue;
      const std::size_t off = r * width;
      adam_update(p.value.data().subspan(off, width), p.value.grad().subspan(off, width),
                  std::span<double>(m_[k]).subspan(off, width), std::span<double>(v_[k]).subspan(off, width),
                  config_, t_);
    }
  }
}

void zero_grads(std::span<Parameter> params) {
  for (Parameter& p : params) p.value.zero_grad();
}

void scale_grads(std::span<Parameter> params, double factor) {
  for (Parameter& p : params) {
    for (double& g : p.value.grad()) g *= factor;
  }
}

}  // namespace kglink::numeric
