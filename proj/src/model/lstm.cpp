#include "kglink/model/lstm.hpp"

#include "kglink/errors.hpp"
#include "kglink/numeric/ops.hpp"

namespace kglink::model {

using namespace numeric;

LSTMParams LSTMParams::zeros(std::size_t input_dim, std::size_t hidden) {
  const Shape w{input_dim + hidden, hidden};
  const Shape b{1, hidden};
  return {Tensor::zeros(w), Tensor::zeros(w), Tensor::zeros(w), Tensor::zeros(w),
          Tensor::zeros(b), Tensor::zeros(b), Tensor::zeros(b), Tensor::zeros(b)};
}

LSTMParams LSTMParams::uniform(std::size_t input_dim, std::size_t hidden, double scale, std::mt19937_64& rng) {
  LSTMParams p = zeros(input_dim, hidden);
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (Tensor* w : {&p.w_forget, &p.w_input, &p.w_output, &p.w_cell})
    for (double& v : w->data()) v = dist(rng);
  return p;
}

void LSTMParams::validate() const {
  const Shape w = w_forget.shape();
  if (w.size() != 2 || w[0] <= w[1]) throw ShapeError("lstm: bad forget-gate weight shape " + to_string(w));
  const Shape b{1, w[1]};
  for (const Tensor* t : {&w_input, &w_output, &w_cell}) {
    if (t->shape() != w) throw ShapeError("lstm: gate weights disagree, " + to_string(w) + " vs " + to_string(t->shape()));
  }
  for (const Tensor* t : {&b_forget, &b_input, &b_output, &b_cell}) {
    if (t->shape() != b) throw ShapeError("lstm: bias shape " + to_string(t->shape()) + ", expected " + to_string(b));
  }
}

void LSTMParams::append_parameters(std::vector<Parameter>& out, const std::string& prefix) const {
  out.push_back({prefix + ".w_forget", w_forget, {}});
  out.push_back({prefix + ".w_input", w_input, {}});
  out.push_back({prefix + ".w_output", w_output, {}});
  out.push_back({prefix + ".w_cell", w_cell, {}});
  out.push_back({prefix + ".b_forget", b_forget, {}});
  out.push_back({prefix + ".b_input", b_input, {}});
  out.push_back({prefix + ".b_output", b_output, {}});
  out.push_back({prefix + ".b_cell", b_cell, {}});
}

LSTMState LSTMState::zeros(std::size_t hidden) {
  return {Tensor::zeros({1, hidden}), Tensor::zeros({1, hidden})};
}

LSTMStep lstm_cell(Tape& tape, const LSTMParams& params, const Tensor& x, const LSTMState& prev) {
  if (!prev.initialized()) throw std::logic_error("lstm_cell: previous state is not initialized");
  const std::size_t hidden = params.hidden();
  if (x.rank() != 2 || x.rows() != 1 || x.cols() != params.input_dim()) {
    throw ShapeError("lstm_cell: input " + to_string(x.shape()) + " does not match input width " +
                     std::to_string(params.input_dim()));
  }
  if (prev.h.shape() != Shape{1, hidden} || prev.c.shape() != Shape{1, hidden}) {
    throw ShapeError("lstm_cell: state shape " + to_string(prev.h.shape()) + " does not match hidden size " +
                     std::to_string(hidden));
  }
  const Tensor xh = concat(tape, x, prev.h, 1);
  LSTMStep step;
  step.forget_gate = sigmoid(tape, add(tape, matmul(tape, xh, params.w_forget), params.b_forget));
  step.input_gate = sigmoid(tape, add(tape, matmul(tape, xh, params.w_input), params.b_input));
  step.output_gate = sigmoid(tape, add(tape, matmul(tape, xh, params.w_output), params.b_output));
  step.candidate = tanh_op(tape, add(tape, matmul(tape, xh, params.w_cell), params.b_cell));
  step.state.c = add(tape, mul(tape, step.forget_gate, prev.c), mul(tape, step.input_gate, step.candidate));
  step.state.h = mul(tape, step.output_gate, tanh_op(tape, step.state.c));
  return step;
}

}  // namespace kglink::model
