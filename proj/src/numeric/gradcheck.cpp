#include "kglink/numeric/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace kglink::numeric {

namespace {

double evaluate(const std::function<Tensor(Tape&)>& forward) {
  Tape tape(false);
  const double loss = forward(tape).item();
  if (!std::isfinite(loss)) throw std::domain_error("grad_check: loss is not finite");
  return loss;
}

}  // namespace

GradCheckResult grad_check(const std::function<Tensor(Tape&)>& forward, std::span<Parameter> params,
                           const GradCheckOptions& options) {
  for (Parameter& p : params) {
    if (!p.value.requires_grad()) p.value.set_requires_grad(true);
    p.value.zero_grad();
  }
  {
    Tape tape;
    Tensor loss = forward(tape);
    if (!std::isfinite(loss.item())) throw std::domain_error("grad_check: loss is not finite");
    tape.backward(loss);
  }

  std::mt19937_64 rng(options.seed);
  GradCheckResult result;
  for (Parameter& p : params) {
    const std::vector<double> analytic(p.value.grad().begin(), p.value.grad().end());
    std::vector<std::size_t> coords(p.value.size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (options.coords_per_param != 0 && coords.size() > options.coords_per_param) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.coords_per_param);
    }
    auto values = p.value.data();
    for (std::size_t idx : coords) {
      const double saved = values[idx];
      values[idx] = saved + options.epsilon;
      const double plus = evaluate(forward);
      values[idx] = saved - options.epsilon;
      const double minus = evaluate(forward);
      values[idx] = saved;
      const double numeric = (plus - minus) / (2.0 * options.epsilon);
      const double denom = std::max({1.0, std::abs(analytic[idx]), std::abs(numeric)});
      const double err = std::abs(analytic[idx] - numeric) / denom;
      ++result.coordinates_checked;
      if (err > result.max_relative_error || result.worst_parameter.empty()) {
        if (err >= result.max_relative_error) {
          result.max_relative_error = err;
          result.worst_parameter = p.name;
          result.worst_index = idx;
        }
      }
    }
  }
  return result;
}

}  // namespace kglink::numeric
