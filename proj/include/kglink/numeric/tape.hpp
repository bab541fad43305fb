#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "kglink/numeric/tensor.hpp"

namespace kglink::numeric {

/// Ordered record of differentiable operations for one forward pass.
///
/// Ops append an entry when recording is on and at least one input needs a
/// gradient. backward() walks the entries in exact reverse order; each
/// entry's closure adds into its inputs' gradient buffers, so a tensor used
/// by several consumers ends up with the sum of their contributions.
///
/// A tape belongs to one thread for its whole life.
class Tape {
 public:
  using BackwardFn = std::function<void()>;

  struct Entry {
    std::string op;
    std::vector<Tensor> inputs;
    Tensor output;
    BackwardFn backward;
  };

  explicit Tape(bool recording = true) : recording_(recording) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  bool recording() const noexcept { return recording_; }

  /// True when an op over `inputs` must be recorded.
  bool tracks(std::initializer_list<const Tensor*> inputs) const;

  /// Appends an op. `output` must already carry a gradient buffer.
  void record(std::string op, std::vector<Tensor> inputs, Tensor output, BackwardFn backward);

  /// Seeds d(loss)/d(loss) = 1 and replays all entries backwards. `visit`,
  /// when set, is called with each entry just before its closure runs.
  void backward(Tensor loss, const std::function<void(const Entry&)>& visit = {});

  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  void clear() { entries_.clear(); }

 private:
  bool recording_;
  std::vector<Entry> entries_;
};

}  // namespace kglink::numeric
