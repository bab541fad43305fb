#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kglink/data/examples.hpp"
#include "kglink/model/seq2seq.hpp"
#include "kglink/model/trainer.hpp"

namespace kglink::pipeline {

struct TaskTrainingConfig {
  model::Seq2SeqConfig model;
  model::TrainConfig train;
  std::size_t vocab_size = 50000;
  std::size_t min_count = 1;
  /// GloVe-style vectors; rows found there are frozen.
  std::optional<std::filesystem::path> embeddings;
};

/// Vocabulary over every source and target token of `examples` (one table
/// for both sides, so copied tokens keep their identity).
text::Vocabulary task_vocabulary(const std::vector<data::TokenExample>& examples, std::size_t max_size,
                                 std::size_t min_count = 1);

/// Builds the vocabulary, initializes a model for `task` and trains it.
/// Sources longer than config.model.max_source_len are cut (targets are
/// left whole). `trace`, when given, receives the per-epoch losses.
model::Seq2SeqModel train_task_model(const std::string& task, const std::vector<data::TokenExample>& examples,
                                     const TaskTrainingConfig& config, std::vector<double>* trace = nullptr,
                                     const model::EpochCallback& on_epoch = {});

}  // namespace kglink::pipeline
