#include "kglink/model/trainer.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "kglink/numeric/tape.hpp"

namespace kglink::model {

std::vector<double> train(Seq2SeqModel& model, std::span<const SequencePair> examples, const TrainConfig& config,
                          const EpochCallback& on_epoch) {
  if (examples.empty()) throw std::invalid_argument("train: empty dataset");
  if (config.batch_size == 0) throw std::invalid_argument("train: batch size must be positive");
  for (const auto& ex : examples) {
    if (ex.source.empty() || ex.source.size() > model.config.max_source_len) {
      throw std::invalid_argument("train: source length " + std::to_string(ex.source.size()) + " outside [1, " +
                                  std::to_string(model.config.max_source_len) + "]");
    }
    if (ex.target.empty() || ex.target.back() != text::kEos) throw std::invalid_argument("train: target must end with EOS");
  }

  std::vector<numeric::Parameter> params = model.parameters();
  for (auto& p : params) {
    if (!p.value.requires_grad()) p.value.set_requires_grad(true);
  }
  numeric::Adam adam(config.adam);
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<double> trace;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    std::size_t in_batch = 0;
    numeric::zero_grads(params);
    for (std::size_t k = 0; k < order.size(); ++k) {
      const SequencePair& ex = examples[order[k]];
      numeric::Tape tape;
      numeric::Tensor loss = sequence_loss(tape, model, ex.source, ex.target);
      total += loss.item();
      tape.backward(loss);
      ++in_batch;
      if (in_batch == config.batch_size || k + 1 == order.size()) {
        if (in_batch > 1) numeric::scale_grads(params, 1.0 / static_cast<double>(in_batch));
        adam.step(params);
        numeric::zero_grads(params);
        in_batch = 0;
      }
    }
    trace.push_back(total / static_cast<double>(examples.size()));
    if (on_epoch && !on_epoch(epoch, trace.back())) break;
  }
  for (auto& p : params) p.value.set_requires_grad(false);
  return trace;
}

double exact_match_accuracy(const Seq2SeqModel& model, std::span<const SequencePair> examples) {
  if (examples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& ex : examples) {
    const auto decoded = greedy_decode(model, ex.source);
    std::vector<int> expect(ex.target.begin(), ex.target.end());
    if (!expect.empty() && expect.back() == text::kEos) expect.pop_back();
    if (decoded.ids == expect) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

}  // namespace kglink::model
