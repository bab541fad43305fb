#include "kglink/pipeline/training.hpp"

#include <stdexcept>

namespace kglink::pipeline {

text::Vocabulary task_vocabulary(const std::vector<data::TokenExample>& examples, std::size_t max_size,
                                 std::size_t min_count) {
  std::vector<std::vector<std::string>> streams;
  streams.reserve(examples.size() * 2);
  for (const auto& ex : examples) {
    streams.push_back(ex.source);
    streams.push_back(ex.target);
  }
  return text::Vocabulary::build(streams, max_size, min_count);
}

model::Seq2SeqModel train_task_model(const std::string& task, const std::vector<data::TokenExample>& examples,
                                     const TaskTrainingConfig& config, std::vector<double>* trace,
                                     const model::EpochCallback& on_epoch) {
  if (examples.empty()) throw std::invalid_argument("no training examples for the " + task + " model");
  auto vocab = task_vocabulary(examples, config.vocab_size, config.min_count);
  const std::uint64_t seed = config.train.seed;
  text::EmbeddingTable src_emb, tgt_emb;
  if (config.embeddings) {
    src_emb = text::load_pretrained(*config.embeddings, vocab, config.model.embed_dim, seed ^ 0x5eed);
    tgt_emb = text::load_pretrained(*config.embeddings, vocab, config.model.embed_dim, seed ^ 0x7a46);
  } else {
    src_emb = text::random_embeddings(vocab, config.model.embed_dim, seed ^ 0x5eed);
    tgt_emb = text::random_embeddings(vocab, config.model.embed_dim, seed ^ 0x7a46);
  }
  auto m = model::Seq2SeqModel::initialize(task, config.model, vocab, vocab, std::move(src_emb), std::move(tgt_emb), seed);

  std::vector<model::SequencePair> pairs;
  pairs.reserve(examples.size());
  for (const auto& ex : examples) {
    auto p = data::encode(ex, vocab, vocab);
    if (p.source.size() > config.model.max_source_len) p.source.resize(config.model.max_source_len);
    if (p.source.empty()) continue;
    pairs.push_back(std::move(p));
  }
  if (pairs.empty()) throw std::invalid_argument("every " + task + " example has an empty source");
  auto losses = model::train(m, pairs, config.train, on_epoch);
  if (trace) *trace = std::move(losses);
  return m;
}

}  // namespace kglink::pipeline
