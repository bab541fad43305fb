#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kglink/model/seq2seq.hpp"
#include "kglink/numeric/optim.hpp"

namespace kglink::model {

/// One source/target pair of token ids. The target ends with EOS.
struct SequencePair {
  std::vector<int> source;
  std::vector<int> target;
};

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 1;
  numeric::AdamConfig adam{};
  std::uint64_t seed = 42;
};

/// Called after each epoch with (epoch index, mean loss). Returning false stops training.
using EpochCallback = std::function<bool(std::size_t, double)>;

/// Teacher-forced training with Adam. Examples are visited in a fresh seeded
/// permutation each epoch; gradients are averaged over `batch_size`
/// examples before each update. Returns the mean loss of every epoch.
/// Throws std::invalid_argument on an empty dataset or an example that
/// violates the model's length limits.
std::vector<double> train(Seq2SeqModel& model, std::span<const SequencePair> examples, const TrainConfig& config,
                          const EpochCallback& on_epoch = {});

/// Fraction of pairs whose greedy decode equals the target minus its EOS.
double exact_match_accuracy(const Seq2SeqModel& model, std::span<const SequencePair> examples);

}  // namespace kglink::model
