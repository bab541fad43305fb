#include "kglink/numeric/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "kglink/errors.hpp"
#include "kglink/kernels/gemm.hpp"

namespace kglink::numeric {

namespace {

Tensor make_output(Shape shape, std::vector<double> values, bool track) {
  return Tensor::from(std::move(shape), std::move(values), track);
}

void require_2d(const Tensor& t, const char* op) {
  if (t.rank() != 2) throw ShapeError(std::string(op) + ": expected a 2-D tensor, got " + to_string(t.shape()));
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  }
}

}  // namespace

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
  require_2d(a, "matmul");
  require_2d(b, "matmul");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) {
    throw ShapeError("matmul: inner dimensions differ, " + to_string(a.shape()) + " x " + to_string(b.shape()));
  }
  std::vector<double> out(m * n, 0.0);
  kernels::gemm_nn(a.data(), b.data(), out, m, k, n);
  const bool track = tape.tracks({&a, &b});
  Tensor c = make_output({m, n}, std::move(out), track);
  if (track) {
    tape.record("matmul", {a, b}, c, [a = Tensor(a), b = Tensor(b), c, m, k, n]() mutable {
      if (a.requires_grad()) kernels::gemm_nt(c.grad(), b.data(), a.grad(), m, n, k);
      if (b.requires_grad()) kernels::gemm_tn(a.data(), c.grad(), b.grad(), m, k, n);
    });
  }
  return c;
}

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.size());
  const auto ad = a.data();
  const auto bd = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ad[i] + bd[i];
  const bool track = tape.tracks({&a, &b});
  Tensor c = make_output(a.shape(), std::move(out), track);
  if (track) {
    tape.record("add", {a, b}, c, [a = Tensor(a), b = Tensor(b), c]() mutable {
      const auto g = c.grad();
      if (a.requires_grad()) {
        auto ga = a.grad();
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
      }
      if (b.requires_grad()) {
        auto gb = b.grad();
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
      }
    });
  }
  return c;
}

Tensor mul(Tape& tape, const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.size());
  const auto ad = a.data();
  const auto bd = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ad[i] * bd[i];
  const bool track = tape.tracks({&a, &b});
  Tensor c = make_output(a.shape(), std::move(out), track);
  if (track) {
    tape.record("mul", {a, b}, c, [a = Tensor(a), b = Tensor(b), c]() mutable {
      const auto g = c.grad();
      if (a.requires_grad()) {
        auto ga = a.grad();
        const auto bd = b.data();
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bd[i];
      }
      if (b.requires_grad()) {
        auto gb = b.grad();
        const auto ad = a.data();
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * ad[i];
      }
    });
  }
  return c;
}

Tensor sigmoid(Tape& tape, const Tensor& x) {
  std::vector<double> out(x.size());
  const auto xd = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = stable_sigmoid(xd[i]);
  const bool track = tape.tracks({&x});
  Tensor y = make_output(x.shape(), std::move(out), track);
  if (track) {
    tape.record("sigmoid", {x}, y, [x = Tensor(x), y]() mutable {
      const auto g = y.grad();
      const auto s = y.data();
      auto gx = x.grad();
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * s[i] * (1.0 - s[i]);
    });
  }
  return y;
}

Tensor tanh_op(Tape& tape, const Tensor& x) {
  std::vector<double> out(x.size());
  const auto xd = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(xd[i]);
  const bool track = tape.tracks({&x});
  Tensor y = make_output(x.shape(), std::move(out), track);
  if (track) {
    tape.record("tanh", {x}, y, [x = Tensor(x), y]() mutable {
      const auto g = y.grad();
      const auto t = y.data();
      auto gx = x.grad();
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * (1.0 - t[i] * t[i]);
    });
  }
  return y;
}

Tensor softmax_rows(Tape& tape, const Tensor& x) {
  require_2d(x, "softmax_rows");
  const std::size_t m = x.rows(), n = x.cols();
  std::vector<double> out(m * n);
  const auto xd = x.data();
  for (std::size_t r = 0; r < m; ++r) {
    const double* in = xd.data() + r * n;
    double* o = out.data() + r * n;
    const double mx = *std::max_element(in, in + n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      o[j] = std::exp(in[j] - mx);
      total += o[j];
    }
    for (std::size_t j = 0; j < n; ++j) o[j] /= total;
  }
  const bool track = tape.tracks({&x});
  Tensor y = make_output({m, n}, std::move(out), track);
  if (track) {
    tape.record("softmax_rows", {x}, y, [x = Tensor(x), y, m, n]() mutable {
      const auto g = y.grad();
      const auto s = y.data();
      auto gx = x.grad();
      for (std::size_t r = 0; r < m; ++r) {
        double dot = 0.0;
        for (std::size_t j = 0; j < n; ++j) dot += g[r * n + j] * s[r * n + j];
        for (std::size_t j = 0; j < n; ++j) gx[r * n + j] += s[r * n + j] * (g[r * n + j] - dot);
      }
    });
  }
  return y;
}

Tensor concat(Tape& tape, std::span<const Tensor> parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const Shape& first = parts.front().shape();
  if (axis >= first.size()) throw ShapeError("concat: axis " + std::to_string(axis) + " out of range for " + to_string(first));
  Shape out_shape = first;
  out_shape[axis] = 0;
  for (const Tensor& p : parts) {
    const Shape& s = p.shape();
    if (s.size() != first.size()) throw ShapeError("concat: rank mismatch " + to_string(first) + " vs " + to_string(s));
    for (std::size_t d = 0; d < s.size(); ++d) {
      if (d != axis && s[d] != first[d]) {
        throw ShapeError("concat: shape mismatch " + to_string(first) + " vs " + to_string(s) + " on axis " +
                         std::to_string(d));
      }
    }
    out_shape[axis] += s[axis];
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= first[d];
  for (std::size_t d = axis + 1; d < first.size(); ++d) inner *= first[d];
  const std::size_t out_stride = out_shape[axis] * inner;

  std::vector<double> out(element_count(out_shape));
  std::size_t offset = 0;
  bool track = false;
  for (const Tensor& p : parts) {
    const std::size_t chunk = p.shape()[axis] * inner;
    const auto pd = p.data();
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy_n(pd.data() + o * chunk, chunk, out.data() + o * out_stride + offset);
    }
    offset += chunk;
    track = track || tape.tracks({&p});
  }
  Tensor y = make_output(out_shape, std::move(out), track);
  if (track) {
    std::vector<Tensor> inputs(parts.begin(), parts.end());
    tape.record("concat", inputs, y, [inputs, y, axis, outer, inner, out_stride]() mutable {
      const auto g = y.grad();
      std::size_t off = 0;
      for (Tensor& p : inputs) {
        const std::size_t chunk = p.shape()[axis] * inner;
        if (p.requires_grad()) {
          auto gp = p.grad();
          for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t j = 0; j < chunk; ++j) gp[o * chunk + j] += g[o * out_stride + off + j];
          }
        }
        off += chunk;
      }
    });
  }
  return y;
}

Tensor concat(Tape& tape, const Tensor& a, const Tensor& b, std::size_t axis) {
  const Tensor parts[] = {a, b};
  return concat(tape, parts, axis);
}

Tensor transpose(Tape& tape, const Tensor& a) {
  require_2d(a, "transpose");
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<double> out(m * n);
  const auto ad = a.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = ad[i * n + j];
  const bool track = tape.tracks({&a});
  Tensor y = make_output({n, m}, std::move(out), track);
  if (track) {
    tape.record("transpose", {a}, y, [a = Tensor(a), y, m, n]() mutable {
      const auto g = y.grad();
      auto ga = a.grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += g[j * m + i];
    });
  }
  return y;
}

Tensor gather_rows(Tape& tape, const Tensor& table, std::span<const int> ids) {
  require_2d(table, "gather_rows");
  const std::size_t v = table.rows(), d = table.cols();
  std::vector<int> rows(ids.begin(), ids.end());
  std::vector<double> out(rows.size() * d);
  const auto td = table.data();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || static_cast<std::size_t>(rows[r]) >= v) {
      throw std::out_of_range("gather_rows: id " + std::to_string(rows[r]) + " outside table of " +
                              std::to_string(v) + " rows");
    }
    std::copy_n(td.data() + static_cast<std::size_t>(rows[r]) * d, d, out.data() + r * d);
  }
  const bool track = tape.tracks({&table});
  Tensor y = make_output({rows.size(), d}, std::move(out), track);
  if (track) {
    tape.record("gather_rows", {table}, y, [table = Tensor(table), y, rows, d]() mutable {
      const auto g = y.grad();
      auto gt = table.grad();
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t base = static_cast<std::size_t>(rows[r]) * d;
        for (std::size_t j = 0; j < d; ++j) gt[base + j] += g[r * d + j];
      }
    });
  }
  return y;
}

Tensor slice_row(Tape& tape, const Tensor& x, std::size_t r) {
  require_2d(x, "slice_row");
  const std::size_t n = x.cols();
  if (r >= x.rows()) throw std::out_of_range("slice_row: row " + std::to_string(r) + " of " + to_string(x.shape()));
  const auto xd = x.data();
  std::vector<double> out(xd.begin() + static_cast<std::ptrdiff_t>(r * n),
                          xd.begin() + static_cast<std::ptrdiff_t>((r + 1) * n));
  const bool track = tape.tracks({&x});
  Tensor y = make_output({1, n}, std::move(out), track);
  if (track) {
    tape.record("slice_row", {x}, y, [x = Tensor(x), y, r, n]() mutable {
      const auto g = y.grad();
      auto gx = x.grad();
      for (std::size_t j = 0; j < n; ++j) gx[r * n + j] += g[j];
    });
  }
  return y;
}

Tensor sum(Tape& tape, const Tensor& x) {
  double total = 0.0;
  for (double v : x.data()) total += v;
  const bool track = tape.tracks({&x});
  Tensor y = make_output({1}, {total}, track);
  if (track) {
    tape.record("sum", {x}, y, [x = Tensor(x), y]() mutable {
      const double g = y.grad()[0];
      for (double& gx : x.grad()) gx += g;
    });
  }
  return y;
}

std::vector<double> log_softmax(std::span<const double> row) {
  const double mx = *std::max_element(row.begin(), row.end());
  double total = 0.0;
  for (double v : row) total += std::exp(v - mx);
  const double lse = mx + std::log(total);
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) out[j] = row[j] - lse;
  return out;
}

Tensor cross_entropy(Tape& tape, const Tensor& logits, std::span<const int> targets, std::optional<int> ignore_index) {
  require_2d(logits, "cross_entropy");
  const std::size_t m = logits.rows(), v = logits.cols();
  if (targets.size() != m) {
    throw ShapeError("cross_entropy: " + std::to_string(targets.size()) + " targets for " + std::to_string(m) +
                     " rows of logits");
  }
  std::vector<int> tgt(targets.begin(), targets.end());
  std::size_t counted = 0;
  for (int t : tgt) {
    if (ignore_index && t == *ignore_index) continue;
    if (t < 0 || static_cast<std::size_t>(t) >= v) {
      throw std::out_of_range("cross_entropy: target " + std::to_string(t) + " outside vocabulary of " +
                              std::to_string(v));
    }
    ++counted;
  }
  if (counted == 0) throw std::invalid_argument("cross_entropy: no target positions to score");

  const auto ld = logits.data();
  std::vector<double> probs(m * v, 0.0);
  double loss = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    if (ignore_index && tgt[r] == *ignore_index) continue;
    const auto lsm = log_softmax(ld.subspan(r * v, v));
    loss -= lsm[static_cast<std::size_t>(tgt[r])];
    for (std::size_t j = 0; j < v; ++j) probs[r * v + j] = std::exp(lsm[j]);
  }
  loss /= static_cast<double>(counted);

  const bool track = tape.tracks({&logits});
  Tensor y = make_output({1}, {loss}, track);
  if (track) {
    tape.record("cross_entropy", {logits}, y,
                [logits = Tensor(logits), y, tgt, probs = std::move(probs), ignore_index, m, v, counted]() mutable {
                  const double g = y.grad()[0] / static_cast<double>(counted);
                  auto gl = logits.grad();
                  for (std::size_t r = 0; r < m; ++r) {
                    if (ignore_index && tgt[r] == *ignore_index) continue;
                    for (std::size_t j = 0; j < v; ++j) {
                      const double onehot = static_cast<std::size_t>(tgt[r]) == j ? 1.0 : 0.0;
                      gl[r * v + j] += g * (probs[r * v + j] - onehot);
                    }
                  }
                });
  }
  return y;
}

}  // namespace kglink::numeric
