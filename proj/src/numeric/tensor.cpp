#include "kglink/numeric/tensor.hpp"

#include <functional>
#include <numeric>
#include <stdexcept>

#include "kglink/errors.hpp"

namespace kglink::numeric {

std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string to_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  const std::size_t n = element_count(shape);
  return from(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
  if (shape.empty()) throw ShapeError("tensor shape must have at least one dimension");
  if (element_count(shape) != values.size()) {
    throw ShapeError("shape " + to_string(shape) + " does not hold " + std::to_string(values.size()) +
                     " values");
  }
  Tensor t;
  t.storage_ = std::make_shared<Storage>();
  t.storage_->shape = std::move(shape);
  t.storage_->data = std::move(values);
  t.set_requires_grad(requires_grad);
  return t;
}

Tensor Tensor::row(std::vector<double> values, bool requires_grad) {
  const std::size_t n = values.size();
  return from({1, n}, std::move(values), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) { return from({1}, {value}, requires_grad); }

Tensor::Storage& Tensor::storage() {
  if (!storage_) throw std::logic_error("use of an undefined tensor");
  return *storage_;
}

const Tensor::Storage& Tensor::storage() const {
  if (!storage_) throw std::logic_error("use of an undefined tensor");
  return *storage_;
}

const Shape& Tensor::shape() const { return storage().shape; }

std::size_t Tensor::size() const { return storage().data.size(); }

std::size_t Tensor::rows() const {
  if (rank() != 2) throw ShapeError("rows() needs a 2-D tensor, got " + to_string(shape()));
  return shape()[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) throw ShapeError("cols() needs a 2-D tensor, got " + to_string(shape()));
  return shape()[1];
}

std::span<double> Tensor::data() { return storage().data; }
std::span<const double> Tensor::data() const { return storage().data; }

double& Tensor::at(std::size_t r, std::size_t c) { return storage().data.at(r * cols() + c); }
double Tensor::at(std::size_t r, std::size_t c) const { return storage().data.at(r * cols() + c); }

double Tensor::item() const {
  if (size() != 1) throw ShapeError("item() on tensor of shape " + to_string(shape()));
  return storage().data[0];
}

bool Tensor::requires_grad() const { return storage().requires_grad; }

void Tensor::set_requires_grad(bool on) {
  Storage& s = storage();
  s.requires_grad = on;
  if (on) {
    s.grad.assign(s.data.size(), 0.0);
  } else {
    s.grad.clear();
    s.grad.shrink_to_fit();
  }
}

bool Tensor::has_grad() const { return storage().requires_grad; }

std::span<double> Tensor::grad() {
  if (!has_grad()) throw std::logic_error("tensor has no gradient buffer");
  return storage().grad;
}

std::span<const double> Tensor::grad() const {
  if (!has_grad()) throw std::logic_error("tensor has no gradient buffer");
  return storage().grad;
}

void Tensor::zero_grad() {
  if (has_grad()) std::fill(storage().grad.begin(), storage().grad.end(), 0.0);
}

Tensor Tensor::clone() const {
  return from(shape(), storage().data, false);
}

}  // namespace kglink::numeric
