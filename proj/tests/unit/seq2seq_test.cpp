#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "kglink/errors.hpp"
#include "kglink/model/checkpoint.hpp"
#include "kglink/model/seq2seq.hpp"
#include "kglink/model/trainer.hpp"
#include "kglink/numeric/gradcheck.hpp"
#include "kglink/numeric/ops.hpp"
#include "support/model_fixtures.hpp"
#include "support/random.hpp"

namespace {

using namespace kglink;
using namespace kglink::model;
using kglink::testing::tiny_model;
namespace ref = kglink::testing::ref;

using kglink::testing::random_ids;
using kglink::testing::randomize;

TEST(LstmCell, ZeroParametersZeroState) {
  Tape tape(false);
  auto params = LSTMParams::zeros(3, 2);
  auto step = lstm_cell(tape, params, Tensor::row({0.3, -1.0, 2.0}), LSTMState::zeros(2));
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(step.forget_gate.data()[k], 0.5);
    EXPECT_EQ(step.input_gate.data()[k], 0.5);
    EXPECT_EQ(step.output_gate.data()[k], 0.5);
    EXPECT_EQ(step.candidate.data()[k], 0.0);
    EXPECT_EQ(step.state.c.data()[k], 0.0);
    EXPECT_EQ(step.state.h.data()[k], 0.0);
  }
}

TEST(LstmCell, ZeroParametersCarryHalfTheCell) {
  Tape tape(false);
  auto params = LSTMParams::zeros(2, 1);
  LSTMState prev{Tensor::row({0.0}), Tensor::row({1.0})};
  auto step = lstm_cell(tape, params, Tensor::row({0.7, 0.1}), prev);
  EXPECT_DOUBLE_EQ(step.state.c.item(), 0.5);
  EXPECT_NEAR(step.state.h.item(), 0.5 * std::tanh(0.5), 1e-15);
  EXPECT_NEAR(step.state.h.item(), 0.23106, 1e-5);
}

TEST(LstmCell, MatchesStraightLineFormulas) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = kglink::testing::random_extent(rng, 1, 6), h = kglink::testing::random_extent(rng, 1, 6);
    auto params = LSTMParams::uniform(d, h, 1.0, rng);
    for (Tensor* b : {&params.b_forget, &params.b_input, &params.b_output, &params.b_cell})
      for (double& v : b->data()) v = std::uniform_real_distribution<double>(-1, 1)(rng);
    auto x = kglink::testing::random_tensor({1, d}, rng);
    LSTMState prev{kglink::testing::random_tensor({1, h}, rng), kglink::testing::random_tensor({1, h}, rng)};
    Tape tape(false);
    auto got = lstm_cell(tape, params, x, prev);
    auto want = ref::lstm(params, ref::values(x), ref::values(prev.h), ref::values(prev.c));
    for (std::size_t k = 0; k < h; ++k) {
      EXPECT_NEAR(got.state.h.data()[k], want.h[k], 1e-12);
      EXPECT_NEAR(got.state.c.data()[k], want.c[k], 1e-12);
      EXPECT_NEAR(got.forget_gate.data()[k], want.f[k], 1e-12);
    }
  }
}

TEST(LstmCell, GateRangesOverRandomInputs) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    auto params = LSTMParams::uniform(4, 3, 2.0, rng);
    Tape tape(false);
    auto step = lstm_cell(tape, params, kglink::testing::random_tensor({1, 4}, rng, false, -3, 3),
                          {kglink::testing::random_tensor({1, 3}, rng), kglink::testing::random_tensor({1, 3}, rng)});
    for (std::size_t k = 0; k < 3; ++k) {
      for (const Tensor* g : {&step.forget_gate, &step.input_gate, &step.output_gate}) {
        EXPECT_GT(g->data()[k], 0.0);
        EXPECT_LT(g->data()[k], 1.0);
      }
      EXPECT_GT(step.candidate.data()[k], -1.0);
      EXPECT_LT(step.candidate.data()[k], 1.0);
      EXPECT_GT(step.state.h.data()[k], -1.0);
      EXPECT_LT(step.state.h.data()[k], 1.0);
    }
  }
}

TEST(LstmCell, ShapeMismatchAndUninitializedState) {
  Tape tape(false);
  auto params = LSTMParams::zeros(3, 2);
  EXPECT_THROW(lstm_cell(tape, params, Tensor::row({1.0}), LSTMState::zeros(2)), ShapeError);
  EXPECT_THROW(lstm_cell(tape, params, Tensor::row({1.0, 2.0, 3.0}), LSTMState{}), std::logic_error);
}

TEST(Encoder, SingleStepSumsDirections) {
  auto m = tiny_model(5, 4, 12, 1);
  Tape tape(false);
  const int src[] = {7};
  auto enc = encode(tape, m, src);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(enc.states.at(0, k), enc.forward_states[0].data()[k] + enc.backward_states[0].data()[k]);
  }
}

TEST(Encoder, ZeroParametersGiveZeroStates) {
  auto m = tiny_model(5, 4, 12, 1);
  for (auto& p : m.parameters())
    if (p.name.rfind("encoder", 0) == 0) std::fill(p.value.data().begin(), p.value.data().end(), 0.0);
  Tape tape(false);
  const int src[] = {5, 6, 7};
  auto enc = encode(tape, m, src);
  for (double v : enc.states.data()) EXPECT_EQ(v, 0.0);
}

TEST(Encoder, PerStepSumOfDirections) {
  std::mt19937_64 rng(23);
  auto m = tiny_model(5, 4, 12, 2);
  Tape tape(false);
  const auto src = random_ids(rng, 6, 12);
  auto enc = encode(tape, m, src);
  for (std::size_t t = 0; t < src.size(); ++t)
    for (std::size_t k = 0; k < 4; ++k)
      EXPECT_EQ(enc.states.at(t, k), enc.forward_states[t].data()[k] + enc.backward_states[t].data()[k]);
}

TEST(Encoder, ReversalSwapsDirections) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = tiny_model(5, 4, 12, 100 + static_cast<std::uint64_t>(trial));
    auto swapped = m.clone();
    std::swap(swapped.encoder_forward, swapped.encoder_backward);
    auto src = random_ids(rng, kglink::testing::random_extent(rng, 1, 8), 12);
    auto rev = src;
    std::reverse(rev.begin(), rev.end());
    Tape tape(false);
    auto a = encode(tape, m, src);
    auto b = encode(tape, swapped, rev);
    const std::size_t n = src.size();
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(b.states.at(n - 1 - t, k), a.states.at(t, k), 1e-12);
  }
}

TEST(Encoder, MatchesStraightLineFormulas) {
  std::mt19937_64 rng(25);
  auto m = tiny_model(5, 4, 12, 3);
  randomize(m, rng);
  const auto src = random_ids(rng, 5, 12);
  Tape tape(false);
  auto got = encode(tape, m, src);
  auto want = ref::encode(m, src);
  for (std::size_t t = 0; t < src.size(); ++t)
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(got.states.at(t, k), want.states[t][k], 1e-12);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(got.final_state.c.data()[k], want.final_c[k], 1e-12);
}

TEST(Encoder, RejectsEmptyAndOverlongSources) {
  auto m = tiny_model(5, 4, 12, 1, 3);
  Tape tape(false);
  EXPECT_THROW(encode(tape, m, std::vector<int>{}), std::invalid_argument);
  EXPECT_THROW(encode(tape, m, std::vector<int>{5, 5, 5, 5}), std::invalid_argument);
}

EncoderOutput manual_encoder(const std::vector<std::vector<double>>& rows) {
  Tape tape(false);
  std::vector<double> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  EncoderOutput e;
  e.states = Tensor::from({rows.size(), rows[0].size()}, flat);
  e.states_transposed = numeric::transpose(tape, e.states);
  return e;
}

TEST(Attention, SingleStateGetsAllWeight) {
  Tape tape(false);
  auto enc = manual_encoder({{0.3, -0.2}});
  auto a = attend(tape, enc, Tensor::row({5.0, 1.0}));
  EXPECT_EQ(a.weights.item(), 1.0);
  EXPECT_EQ(a.context.data()[0], 0.3);
  EXPECT_EQ(a.context.data()[1], -0.2);
}

TEST(Attention, OrthogonalQueryIsUniform) {
  Tape tape(false);
  auto enc = manual_encoder({{0.0, 1.0}, {0.0, -2.0}, {0.0, 0.5}, {0.0, 3.0}});
  auto a = attend(tape, enc, Tensor::row({4.0, 0.0}));
  for (double w : a.weights.data()) EXPECT_NEAR(w, 0.25, 1e-15);
}

TEST(Attention, HandSoftmax) {
  Tape tape(false);
  auto enc = manual_encoder({{std::log(3.0), 0.0}, {0.0, 0.0}});
  auto a = attend(tape, enc, Tensor::row({1.0, 0.0}));
  EXPECT_NEAR(a.weights.data()[0], 0.75, 1e-15);
  EXPECT_NEAR(a.weights.data()[1], 0.25, 1e-15);
}

TEST(Attention, MatchesStraightLineFormulas) {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = kglink::testing::random_extent(rng, 1, 7), h = kglink::testing::random_extent(rng, 1, 5);
    std::vector<std::vector<double>> rows(n);
    for (auto& r : rows) r = kglink::testing::random_values(h, rng, -2, 2);
    auto hm = kglink::testing::random_values(h, rng, -2, 2);
    Tape tape(false);
    auto got = attend(tape, manual_encoder(rows), Tensor::row(hm));
    auto want = ref::attention(rows, hm);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(got.weights.data()[i], want.weights[i], 1e-12);
      EXPECT_GE(got.weights.data()[i], 0.0);
      total += got.weights.data()[i];
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    for (std::size_t k = 0; k < h; ++k) EXPECT_NEAR(got.context.data()[k], want.context[k], 1e-12);
  }
}

TEST(DecodeStep, ZeroOutputWeightsGiveUniformDistribution) {
  auto m = tiny_model(5, 4, 12, 4);
  std::fill(m.w_output.data().begin(), m.w_output.data().end(), 0.0);
  Tape tape(false);
  const int src[] = {5, 6};
  auto enc = encode(tape, m, src);
  auto step = decode_step(tape, m, text::kSos, enc.final_state, enc);
  const auto probs = numeric::softmax_rows(tape, step.logits);
  for (double p : probs.data()) EXPECT_NEAR(p, 1.0 / 12.0, 1e-15);
  double total = 0.0;
  for (double w : step.attention.weights.data()) total += w;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(DecodeStep, MatchesStraightLineFormulas) {
  std::mt19937_64 rng(27);
  for (int trial = 0; trial < 100; ++trial) {
    auto m = tiny_model(5, 4, 12, 200 + static_cast<std::uint64_t>(trial));
    randomize(m, rng);
    const auto src = random_ids(rng, kglink::testing::random_extent(rng, 1, 6), 12);
    const int prev = static_cast<int>(rng() % 12);
    Tape tape(false);
    auto enc = encode(tape, m, src);
    auto got = decode_step(tape, m, prev, enc.final_state, enc);
    auto renc = ref::encode(m, src);
    auto want = ref::decode_step(m, prev, renc.final_h, renc.final_c, renc.states);
    for (std::size_t j = 0; j < 12; ++j) EXPECT_NEAR(got.logits.data()[j], want.logits[j], 1e-12);
    for (std::size_t n = 0; n < src.size(); ++n) EXPECT_NEAR(got.attention.weights.data()[n], want.weights[n], 1e-12);
  }
}

TEST(DecodeStep, UninitializedStateThrows) {
  auto m = tiny_model(5, 4, 12, 4);
  Tape tape(false);
  const int src[] = {5};
  auto enc = encode(tape, m, src);
  EXPECT_THROW(decode_step(tape, m, text::kSos, LSTMState{}, enc), std::logic_error);
}

TEST(GreedyDecode, ForcedEosGivesEmptyOutput) {
  auto m = tiny_model(5, 4, 12, 5);
  kglink::testing::force_eos(m);
  const int src[] = {5, 9, 11};
  auto out = greedy_decode(m, src);
  EXPECT_TRUE(out.ids.empty());
  EXPECT_EQ(out.steps, 1u);
}

TEST(GreedyDecode, LengthBoundedAndPure) {
  std::mt19937_64 rng(28);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = tiny_model(5, 4, 12, 300 + static_cast<std::uint64_t>(trial), 6);
    randomize(m, rng, 2.0);
    const auto src = random_ids(rng, 4, 12);
    auto a = greedy_decode(m, src), b = greedy_decode(m, src);
    EXPECT_LE(a.ids.size(), 6u);
    EXPECT_EQ(a.ids, b.ids);
    EXPECT_EQ(a.mean_log_prob, b.mean_log_prob);
    EXPECT_LE(a.mean_log_prob, 0.0);
  }
}

TEST(GreedyDecode, TiesGoToLowestId) {
  auto m = tiny_model(5, 4, 12, 6, 3);
  std::fill(m.w_output.data().begin(), m.w_output.data().end(), 0.0);
  const int src[] = {5};
  auto out = greedy_decode(m, src);
  EXPECT_EQ(out.ids, (std::vector<int>{text::kPad, text::kPad, text::kPad}));
}

TEST(GradCheck, FullTinyModel) {
  auto m = tiny_model(5, 4, 12, 7);
  std::mt19937_64 rng(29);
  randomize(m, rng, 0.5);
  const std::vector<int> src{5, 8, 11};
  const std::vector<int> tgt{9, 6, text::kEos};
  auto params = m.parameters();
  auto result = numeric::grad_check([&](Tape& t) { return sequence_loss(t, m, src, tgt); }, params);
  EXPECT_LT(result.max_relative_error, 1e-5) << result.worst_parameter;
  std::size_t total = 0;
  for (const auto& p : params) total += p.value.size();
  EXPECT_EQ(result.coordinates_checked, total);
}

TEST(Train, EmptyDatasetThrows) {
  auto m = tiny_model(5, 4, 12, 8);
  EXPECT_THROW(train(m, std::vector<SequencePair>{}, {}), std::invalid_argument);
}

TEST(Train, MemorizesSingleExample) {
  auto m = tiny_model(8, 16, 12, 9);
  std::vector<SequencePair> data{{{5, 6, 7}, {7, 6, text::kEos}}};
  TrainConfig cfg;
  cfg.epochs = 300;
  cfg.adam.learning_rate = 0.01;
  auto trace = train(m, data, cfg);
  EXPECT_LT(trace.back(), 0.01);
  EXPECT_EQ(greedy_decode(m, data[0].source).ids, (std::vector<int>{7, 6}));
}

TEST(Train, SameSeedSameTrace) {
  std::mt19937_64 rng(30);
  std::vector<SequencePair> data;
  for (int i = 0; i < 6; ++i) {
    auto s = random_ids(rng, 3, 12);
    data.push_back({s, {s[0], text::kEos}});
  }
  auto run = [&] {
    auto m = tiny_model(5, 4, 12, 10);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.batch_size = 2;
    return train(m, data, cfg);
  };
  EXPECT_EQ(run(), run());
}

TEST(Train, FirstEpochLossNearUniform) {
  std::mt19937_64 rng(31);
  auto m = tiny_model(8, 8, 100, 11);
  std::vector<SequencePair> data;
  for (int i = 0; i < 20; ++i) {
    auto s = random_ids(rng, 4, 100);
    data.push_back({s, {s[1], s[2], text::kEos}});
  }
  TrainConfig cfg;
  cfg.epochs = 1;
  auto trace = train(m, data, cfg);
  EXPECT_NEAR(trace[0], std::log(100.0), 0.2 * std::log(100.0));
}

TEST(Train, OverfitsCopyTask) {
  std::mt19937_64 rng(32);
  const std::size_t vocab = 20;
  std::vector<SequencePair> data;
  for (int i = 0; i < 20; ++i) {
    auto s = random_ids(rng, kglink::testing::random_extent(rng, 2, 4), vocab);
    auto t = s;
    t.push_back(text::kEos);
    data.push_back({s, t});
  }
  auto m = tiny_model(16, 32, vocab, 12);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.adam.learning_rate = 0.01;
  train(m, data, cfg, [&](std::size_t, double loss) { return loss > 1e-3; });
  EXPECT_EQ(exact_match_accuracy(m, data), 1.0);
}

TEST(Checkpoint, RoundTripPreservesBehaviour) {
  std::mt19937_64 rng(33);
  auto m = tiny_model(5, 4, 12, 13);
  randomize(m, rng);
  m.source_embedding.frozen_rows[6] = 1;
  const auto bytes = serialize_checkpoint(m);
  auto back = deserialize_checkpoint(bytes);
  EXPECT_EQ(serialize_checkpoint(back), bytes);
  EXPECT_EQ(back.source_embedding.frozen_rows[6], 1);
  const int src[] = {5, 7, 9};
  EXPECT_EQ(greedy_decode(back, src).ids, greedy_decode(m, src).ids);
}

TEST(Checkpoint, SameSeedSameBytes) {
  EXPECT_EQ(serialize_checkpoint(tiny_model(5, 4, 12, 14)), serialize_checkpoint(tiny_model(5, 4, 12, 14)));
  EXPECT_NE(serialize_checkpoint(tiny_model(5, 4, 12, 14)), serialize_checkpoint(tiny_model(5, 4, 12, 15)));
}

TEST(Checkpoint, RejectsCorruption) {
  const auto bytes = serialize_checkpoint(tiny_model(5, 4, 12, 16));
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(deserialize_checkpoint(bad_magic), ParseError);
  auto bad_version = bytes;
  bad_version[8] = 9;
  EXPECT_THROW(deserialize_checkpoint(bad_version), ParseError);
  EXPECT_THROW(deserialize_checkpoint(bytes.substr(0, bytes.size() - 3)), ParseError);
}

TEST(Checkpoint, RejectsShapeDisagreement) {
  auto m = tiny_model(5, 4, 12, 17);
  m.w_output = Tensor::zeros({4, 11});
  EXPECT_THROW(serialize_checkpoint(m), ShapeError);
}

TEST(Checkpoint, MissingFileIsArtifactError) {
  EXPECT_THROW(load_checkpoint("/nonexistent/model.ckpt"), ArtifactError);
}

}  // namespace
