#include "kglink/numeric/tape.hpp"

#include <stdexcept>

#include "kglink/errors.hpp"

namespace kglink::numeric {

bool Tape::tracks(std::initializer_list<const Tensor*> inputs) const {
  if (!recording_) return false;
  for (const Tensor* t : inputs) {
    if (t->requires_grad()) return true;
  }
  return false;
}

void Tape::record(std::string op, std::vector<Tensor> inputs, Tensor output, BackwardFn backward) {
  if (!recording_) throw std::logic_error("record() on a tape that is not recording");
  if (!output.has_grad()) throw std::logic_error("recorded output of '" + op + "' has no gradient buffer");
  entries_.push_back({std::move(op), std::move(inputs), std::move(output), std::move(backward)});
}

void Tape::backward(Tensor loss, const std::function<void(const Entry&)>& visit) {
  if (loss.size() != 1) throw ShapeError("backward() needs a scalar loss, got " + to_string(loss.shape()));
  if (!loss.has_grad()) throw std::logic_error("loss does not depend on any tensor that requires grad");
  loss.grad()[0] += 1.0;
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (visit) visit(*it);
    it->backward();
  }
}

}  // namespace kglink::numeric
