#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kglink/model/lstm.hpp"
#include "kglink/text/embedding.hpp"
#include "kglink/text/vocabulary.hpp"

namespace kglink::model {

struct Seq2SeqConfig {
  std::size_t embed_dim = 300;
  std::size_t hidden = 300;
  std::size_t max_source_len = 25;
  std::size_t max_decode_len = 25;
};

/// Attentive encoder-decoder: Bi-LSTM encoder whose per-step hidden states
/// are summed, LSTM decoder started from the encoder's final state, dot
/// attention, and a tanh projection feeding a softmax over the target
/// vocabulary. Decoder and encoder share the hidden size so attention
/// scores are plain dot products.
struct Seq2SeqModel {
  std::string task;
  Seq2SeqConfig config;
  text::Vocabulary source_vocab;
  text::Vocabulary target_vocab;
  text::EmbeddingTable source_embedding;
  text::EmbeddingTable target_embedding;
  LSTMParams encoder_forward;
  LSTMParams encoder_backward;
  LSTMParams decoder;
  Tensor w_attention;  // [2h x h]: [context, decoder h] -> attention vector
  Tensor w_output;     // [h x V_out]

  /// Fresh model. LSTM and projection weights are uniform in +-1/sqrt(h);
  /// embeddings are taken as given (see text::load_pretrained).
  static Seq2SeqModel initialize(std::string task, const Seq2SeqConfig& config, text::Vocabulary source_vocab,
                                 text::Vocabulary target_vocab, text::EmbeddingTable source_embedding,
                                 text::EmbeddingTable target_embedding, std::uint64_t seed);

  /// Same, with seeded random embeddings for both vocabularies.
  static Seq2SeqModel initialize(std::string task, const Seq2SeqConfig& config, text::Vocabulary source_vocab,
                                 text::Vocabulary target_vocab, std::uint64_t seed);

  /// Handles to every trainable tensor in a fixed order. Frozen embedding
  /// rows are carried in the parameters' masks.
  std::vector<Parameter> parameters() const;

  /// Throws ShapeError if any tensor disagrees with config or vocabularies.
  void validate() const;

  /// Independent copy of every tensor.
  Seq2SeqModel clone() const;
};

struct EncoderOutput {
  Tensor states;             // [N x h], row n = forward h_n + backward h_n
  Tensor states_transposed;  // [h x N]
  std::vector<Tensor> forward_states;
  std::vector<Tensor> backward_states;  // indexed by source position
  LSTMState final_state;                // summed (h, C) at the last position
};

/// Embeds `source` and runs both directions from zero states.
/// Throws std::invalid_argument on an empty source or one longer than
/// config.max_source_len.
EncoderOutput encode(Tape& tape, const Seq2SeqModel& model, std::span<const int> source);

struct AttentionResult {
  Tensor weights;  // [1 x N], softmax of h_dec . h_n
  Tensor context;  // [1 x h], sum_n a_n h_n
};

AttentionResult attend(Tape& tape, const EncoderOutput& encoded, const Tensor& decoder_hidden);

struct DecodeStep {
  Tensor logits;            // [1 x V_out]
  Tensor attention_vector;  // [1 x h], tanh(W_v [context; h])
  AttentionResult attention;
  LSTMState state;
};

/// One decoder step fed with the embedding of `previous`.
DecodeStep decode_step(Tape& tape, const Seq2SeqModel& model, int previous, const LSTMState& state,
                       const EncoderOutput& encoded);

struct DecodeResult {
  std::vector<int> ids;  // without the final EOS
  double mean_log_prob = 0.0;
  std::size_t steps = 0;
};

/// Greedy argmax decoding from SOS until EOS or config.max_decode_len steps.
/// Ties go to the lowest id. Pure function of parameters and source.
DecodeResult greedy_decode(const Seq2SeqModel& model, std::span<const int> source);

/// Teacher-forced mean cross-entropy of `target` (which ends with EOS) given
/// `source`. PAD positions in `target` are not scored.
Tensor sequence_loss(Tape& tape, const Seq2SeqModel& model, std::span<const int> source, std::span<const int> target);

}  // namespace kglink::model
