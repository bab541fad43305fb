#include "kglink/model/seq2seq.hpp"

#include <cmath>
#include <stdexcept>

#include "kglink/errors.hpp"
#include "kglink/numeric/ops.hpp"

namespace kglink::model {

using namespace numeric;

Seq2SeqModel Seq2SeqModel::initialize(std::string task, const Seq2SeqConfig& config, text::Vocabulary source_vocab,
                                      text::Vocabulary target_vocab, text::EmbeddingTable source_embedding,
                                      text::EmbeddingTable target_embedding, std::uint64_t seed) {
  if (config.hidden == 0 || config.embed_dim == 0) throw ConfigError("hidden size and embedding dim must be positive");
  std::mt19937_64 rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(config.hidden));
  Seq2SeqModel m;
  m.task = std::move(task);
  m.config = config;
  m.source_vocab = std::move(source_vocab);
  m.target_vocab = std::move(target_vocab);
  m.source_embedding = std::move(source_embedding);
  m.target_embedding = std::move(target_embedding);
  m.encoder_forward = LSTMParams::uniform(config.embed_dim, config.hidden, scale, rng);
  m.encoder_backward = LSTMParams::uniform(config.embed_dim, config.hidden, scale, rng);
  m.decoder = LSTMParams::uniform(config.embed_dim, config.hidden, scale, rng);
  std::uniform_real_distribution<double> dist(-scale, scale);
  m.w_attention = Tensor::zeros({2 * config.hidden, config.hidden});
  for (double& v : m.w_attention.data()) v = dist(rng);
  m.w_output = Tensor::zeros({config.hidden, m.target_vocab.size()});
  for (double& v : m.w_output.data()) v = dist(rng);
  m.validate();
  return m;
}

Seq2SeqModel Seq2SeqModel::initialize(std::string task, const Seq2SeqConfig& config, text::Vocabulary source_vocab,
                                      text::Vocabulary target_vocab, std::uint64_t seed) {
  auto src = text::random_embeddings(source_vocab, config.embed_dim, seed ^ 0x5eedULL);
  auto tgt = text::random_embeddings(target_vocab, config.embed_dim, seed ^ 0x7a46ULL);
  return initialize(std::move(task), config, std::move(source_vocab), std::move(target_vocab), std::move(src),
                    std::move(tgt), seed);
}

std::vector<Parameter> Seq2SeqModel::parameters() const {
  std::vector<Parameter> out;
  out.push_back({"source_embedding", source_embedding.matrix, source_embedding.frozen_rows});
  out.push_back({"target_embedding", target_embedding.matrix, target_embedding.frozen_rows});
  encoder_forward.append_parameters(out, "encoder_forward");
  encoder_backward.append_parameters(out, "encoder_backward");
  decoder.append_parameters(out, "decoder");
  out.push_back({"w_attention", w_attention, {}});
  out.push_back({"w_output", w_output, {}});
  return out;
}

void Seq2SeqModel::validate() const {
  const std::size_t d = config.embed_dim, h = config.hidden;
  auto expect = [](const Tensor& t, const Shape& s, const char* name) {
    if (!t.defined() || t.shape() != s) {
      throw ShapeError(std::string(name) + ": shape " + (t.defined() ? to_string(t.shape()) : "undefined") +
                       ", expected " + to_string(s));
    }
  };
  expect(source_embedding.matrix, {source_vocab.size(), d}, "source_embedding");
  expect(target_embedding.matrix, {target_vocab.size(), d}, "target_embedding");
  for (const LSTMParams* p : {&encoder_forward, &encoder_backward, &decoder}) {
    p->validate();
    expect(p->w_forget, {d + h, h}, "lstm weights");
  }
  expect(w_attention, {2 * h, h}, "w_attention");
  expect(w_output, {h, target_vocab.size()}, "w_output");
  if (source_embedding.frozen_rows.size() > source_vocab.size() ||
      target_embedding.frozen_rows.size() > target_vocab.size()) {
    throw ShapeError("frozen row mask longer than vocabulary");
  }
}

namespace {

LSTMParams clone_lstm(const LSTMParams& p) {
  return {p.w_forget.clone(), p.w_input.clone(), p.w_output.clone(), p.w_cell.clone(),
          p.b_forget.clone(), p.b_input.clone(), p.b_output.clone(), p.b_cell.clone()};
}

text::EmbeddingTable clone_table(const text::EmbeddingTable& t) {
  text::EmbeddingTable out = t;
  out.matrix = t.matrix.clone();
  return out;
}

}  // namespace

Seq2SeqModel Seq2SeqModel::clone() const {
  Seq2SeqModel m = *this;
  m.source_embedding = clone_table(source_embedding);
  m.target_embedding = clone_table(target_embedding);
  m.encoder_forward = clone_lstm(encoder_forward);
  m.encoder_backward = clone_lstm(encoder_backward);
  m.decoder = clone_lstm(decoder);
  m.w_attention = w_attention.clone();
  m.w_output = w_output.clone();
  return m;
}

EncoderOutput encode(Tape& tape, const Seq2SeqModel& model, std::span<const int> source) {
  if (source.empty()) throw std::invalid_argument("encode: empty source sequence");
  if (source.size() > model.config.max_source_len) {
    throw std::invalid_argument("encode: source length " + std::to_string(source.size()) + " exceeds limit " +
                                std::to_string(model.config.max_source_len));
  }
  const std::size_t n = source.size(), h = model.config.hidden;
  const Tensor embedded = gather_rows(tape, model.source_embedding.matrix, source);
  std::vector<Tensor> inputs;
  inputs.reserve(n);
  for (std::size_t t = 0; t < n; ++t) inputs.push_back(slice_row(tape, embedded, t));

  EncoderOutput out;
  out.forward_states.resize(n);
  out.backward_states.resize(n);
  std::vector<Tensor> forward_cells(n), backward_cells(n);

  LSTMState state = LSTMState::zeros(h);
  for (std::size_t t = 0; t < n; ++t) {
    state = lstm_cell(tape, model.encoder_forward, inputs[t], state).state;
    out.forward_states[t] = state.h;
    forward_cells[t] = state.c;
  }
  state = LSTMState::zeros(h);
  for (std::size_t t = n; t-- > 0;) {
    state = lstm_cell(tape, model.encoder_backward, inputs[t], state).state;
    out.backward_states[t] = state.h;
    backward_cells[t] = state.c;
  }

  std::vector<Tensor> summed;
  summed.reserve(n);
  for (std::size_t t = 0; t < n; ++t) summed.push_back(add(tape, out.forward_states[t], out.backward_states[t]));
  out.states = concat(tape, summed, 0);
  out.states_transposed = transpose(tape, out.states);
  out.final_state.h = summed.back();
  out.final_state.c = add(tape, forward_cells.back(), backward_cells.back());
  return out;
}

AttentionResult attend(Tape& tape, const EncoderOutput& encoded, const Tensor& decoder_hidden) {
  AttentionResult r;
  r.weights = softmax_rows(tape, matmul(tape, decoder_hidden, encoded.states_transposed));
  r.context = matmul(tape, r.weights, encoded.states);
  return r;
}

DecodeStep decode_step(Tape& tape, const Seq2SeqModel& model, int previous, const LSTMState& state,
                       const EncoderOutput& encoded) {
  if (!state.initialized()) throw std::logic_error("decode_step: decoder state is not initialized");
  const int ids[] = {previous};
  const Tensor x = gather_rows(tape, model.target_embedding.matrix, ids);
  DecodeStep step;
  step.state = lstm_cell(tape, model.decoder, x, state).state;
  step.attention = attend(tape, encoded, step.state.h);
  const Tensor joined = concat(tape, step.attention.context, step.state.h, 1);
  step.attention_vector = tanh_op(tape, matmul(tape, joined, model.w_attention));
  step.logits = matmul(tape, step.attention_vector, model.w_output);
  return step;
}

DecodeResult greedy_decode(const Seq2SeqModel& model, std::span<const int> source) {
  Tape tape(false);
  const EncoderOutput encoded = encode(tape, model, source);
  DecodeResult result;
  LSTMState state = encoded.final_state;
  int previous = text::kSos;
  double total_log_prob = 0.0;
  while (result.steps < model.config.max_decode_len) {
    DecodeStep step = decode_step(tape, model, previous, state, encoded);
    const auto logits = step.logits.data();
    std::size_t best = 0;
    for (std::size_t j = 1; j < logits.size(); ++j) {
      if (logits[j] > logits[best]) best = j;
    }
    total_log_prob += log_softmax(logits)[best];
    ++result.steps;
    if (static_cast<int>(best) == text::kEos) break;
    result.ids.push_back(static_cast<int>(best));
    previous = static_cast<int>(best);
    state = step.state;
  }
  result.mean_log_prob = result.steps ? total_log_prob / static_cast<double>(result.steps) : 0.0;
  return result;
}

Tensor sequence_loss(Tape& tape, const Seq2SeqModel& model, std::span<const int> source, std::span<const int> target) {
  if (target.empty()) throw std::invalid_argument("sequence_loss: empty target");
  const EncoderOutput encoded = encode(tape, model, source);
  LSTMState state = encoded.final_state;
  std::vector<Tensor> logits;
  logits.reserve(target.size());
  int previous = text::kSos;
  for (int gold : target) {
    DecodeStep step = decode_step(tape, model, previous, state, encoded);
    logits.push_back(step.logits);
    state = step.state;
    previous = gold;
  }
  return cross_entropy(tape, concat(tape, logits, 0), target, text::kPad);
}

}  // namespace kglink::model
