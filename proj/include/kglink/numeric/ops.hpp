#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kglink/numeric/tape.hpp"
#include "kglink/numeric/tensor.hpp"

// Differentiable tensor operations. Each op computes its forward value
// eagerly and, when `tape` is recording and an input requires a gradient,
// records the matching backward closure.

namespace kglink::numeric {

/// [m x k] * [k x n] -> [m x n]. Backward: dA = dC B^T, dB = A^T dC.
Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b);

/// Elementwise sum of two tensors of identical shape.
Tensor add(Tape& tape, const Tensor& a, const Tensor& b);

/// Elementwise (Hadamard) product of two tensors of identical shape.
Tensor mul(Tape& tape, const Tensor& a, const Tensor& b);

/// Elementwise logistic function, evaluated without overflow for any finite x.
Tensor sigmoid(Tape& tape, const Tensor& x);

Tensor tanh_op(Tape& tape, const Tensor& x);

/// Row-wise softmax of a 2-D tensor using max subtraction.
Tensor softmax_rows(Tape& tape, const Tensor& x);

/// Juxtaposes tensors along `axis`. All other extents must agree; zero-size
/// inputs are allowed and contribute nothing.
Tensor concat(Tape& tape, std::span<const Tensor> parts, std::size_t axis);
Tensor concat(Tape& tape, const Tensor& a, const Tensor& b, std::size_t axis);

/// 2-D transpose.
Tensor transpose(Tape& tape, const Tensor& a);

/// Rows `ids` of a [V x d] table, stacked into [ids.size() x d].
Tensor gather_rows(Tape& tape, const Tensor& table, std::span<const int> ids);

/// Row r of a 2-D tensor as a [1 x cols] tensor.
Tensor slice_row(Tape& tape, const Tensor& x, std::size_t r);

/// Sum of all elements as a scalar tensor.
Tensor sum(Tape& tape, const Tensor& x);

/// Mean over positions of -log softmax(logits[i])[targets[i]]. Positions whose
/// target equals `ignore_index` are skipped; at least one must remain.
Tensor cross_entropy(Tape& tape, const Tensor& logits, std::span<const int> targets,
                     std::optional<int> ignore_index = std::nullopt);

/// Numerically stable log-softmax of one row, outside any tape.
std::vector<double> log_softmax(std::span<const double> row);

/// Stable scalar logistic function.
double stable_sigmoid(double x);

}  // namespace kglink::numeric
