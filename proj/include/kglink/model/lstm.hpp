#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "kglink/numeric/optim.hpp"
#include "kglink/numeric/tape.hpp"
#include "kglink/numeric/tensor.hpp"

namespace kglink::model {

using numeric::Parameter;
using numeric::Tape;
using numeric::Tensor;

/// Weights of one LSTM layer. Each gate matrix maps the concatenated row
/// [x_t, h_{t-1}] of width input_dim + hidden to `hidden` units.
struct LSTMParams {
  Tensor w_forget, w_input, w_output, w_cell;
  Tensor b_forget, b_input, b_output, b_cell;

  static LSTMParams zeros(std::size_t input_dim, std::size_t hidden);
  /// Weights uniform in [-scale, scale], biases zero.
  static LSTMParams uniform(std::size_t input_dim, std::size_t hidden, double scale, std::mt19937_64& rng);

  std::size_t input_dim() const { return w_forget.rows() - hidden(); }
  std::size_t hidden() const { return w_forget.cols(); }

  /// Throws ShapeError unless all eight tensors agree.
  void validate() const;
  void append_parameters(std::vector<Parameter>& out, const std::string& prefix) const;
};

/// Hidden state h and cell memory C, each [1 x hidden].
struct LSTMState {
  Tensor h;
  Tensor c;

  bool initialized() const { return h.defined() && c.defined(); }
  static LSTMState zeros(std::size_t hidden);
};

/// Output of one cell application, gate activations included for inspection.
struct LSTMStep {
  LSTMState state;
  Tensor forget_gate;
  Tensor input_gate;
  Tensor output_gate;
  Tensor candidate;
};

/// f = sig(Wf [x,h] + bf), i = sig(Wi [x,h] + bi), o = sig(Wo [x,h] + bo),
/// C~ = tanh(Wc [x,h] + bc), C = f*C_prev + i*C~, h = o*tanh(C).
LSTMStep lstm_cell(Tape& tape, const LSTMParams& params, const Tensor& x, const LSTMState& prev);

}  // namespace kglink::model
