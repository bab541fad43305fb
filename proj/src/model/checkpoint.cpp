#include "kglink/model/checkpoint.hpp"

#include <map>

#include <json.hpp>

#include "kglink/binary.hpp"
#include "kglink/errors.hpp"
#include "kglink/io.hpp"

namespace kglink::model {

namespace {

using binary::put;

constexpr char kMagic[8] = {'K', 'G', 'L', 'C', 'K', 'P', 'T', '\0'};

std::vector<std::size_t> frozen_indices(const text::EmbeddingTable& t) {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < t.frozen_rows.size(); ++r)
    if (t.frozen_rows[r]) out.push_back(r);
  return out;
}

}  // namespace

std::string serialize_checkpoint(const Seq2SeqModel& model) {
  model.validate();
  nlohmann::json header;
  header["task"] = model.task;
  header["embed_dim"] = model.config.embed_dim;
  header["hidden"] = model.config.hidden;
  header["max_source_len"] = model.config.max_source_len;
  header["max_decode_len"] = model.config.max_decode_len;
  header["source_vocab"] = model.source_vocab.entries();
  header["target_vocab"] = model.target_vocab.entries();
  header["source_vocab_hash"] = model.source_vocab.fingerprint();
  header["target_vocab_hash"] = model.target_vocab.fingerprint();
  header["source_frozen_rows"] = frozen_indices(model.source_embedding);
  header["target_frozen_rows"] = frozen_indices(model.target_embedding);
  const std::string json = header.dump();

  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, json.size());
  out += json;
  const auto params = model.parameters();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
    out += p.name;
    const auto& shape = p.value.shape();
    put<std::uint32_t>(out, static_cast<std::uint32_t>(shape.size()));
    for (auto e : shape) put<std::uint64_t>(out, e);
    for (double v : p.value.data()) put<double>(out, v);
  }
  return out;
}

Seq2SeqModel deserialize_checkpoint(const std::string& bytes) {
  binary::Reader in(bytes, "checkpoint");
  if (in.take(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) throw ParseError("not a kglink checkpoint");
  const auto version = in.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw ParseError("checkpoint version " + std::to_string(version) + ", expected " + std::to_string(kCheckpointVersion));
  }
  const auto json_len = in.get<std::uint64_t>();
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(in.take(json_len));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint header: ") + e.what());
  }

  Seq2SeqModel model;
  try {
    model.task = header.at("task").get<std::string>();
    model.config.embed_dim = header.at("embed_dim").get<std::size_t>();
    model.config.hidden = header.at("hidden").get<std::size_t>();
    model.config.max_source_len = header.at("max_source_len").get<std::size_t>();
    model.config.max_decode_len = header.at("max_decode_len").get<std::size_t>();
    model.source_vocab = text::Vocabulary::from_tokens(header.at("source_vocab").get<std::vector<std::string>>());
    model.target_vocab = text::Vocabulary::from_tokens(header.at("target_vocab").get<std::vector<std::string>>());
    if (model.source_vocab.fingerprint() != header.at("source_vocab_hash").get<std::uint64_t>() ||
        model.target_vocab.fingerprint() != header.at("target_vocab_hash").get<std::uint64_t>()) {
      throw ParseError("checkpoint vocabulary fingerprint mismatch");
    }
    auto frozen = [](const nlohmann::json& rows, std::size_t n) {
      std::vector<std::uint8_t> mask(n, 0);
      for (std::size_t r : rows.get<std::vector<std::size_t>>()) {
        if (r >= n) throw ParseError("frozen row " + std::to_string(r) + " outside vocabulary");
        mask[r] = 1;
      }
      return mask;
    };
    model.source_embedding.frozen_rows = frozen(header.at("source_frozen_rows"), model.source_vocab.size());
    model.target_embedding.frozen_rows = frozen(header.at("target_frozen_rows"), model.target_vocab.size());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint header: ") + e.what());
  }
  model.source_embedding.dim = model.config.embed_dim;
  model.target_embedding.dim = model.config.embed_dim;

  std::map<std::string, numeric::Tensor> tensors;
  const auto count = in.get<std::uint32_t>();
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::string name = in.take(in.get<std::uint32_t>());
    const auto rank = in.get<std::uint32_t>();
    numeric::Shape shape;
    for (std::uint32_t d = 0; d < rank; ++d) shape.push_back(in.get<std::uint64_t>());
    std::vector<double> values(numeric::element_count(shape));
    for (double& v : values) v = in.get<double>();
    tensors[name] = numeric::Tensor::from(shape, std::move(values));
  }
  if (!in.done()) throw ParseError("trailing bytes after checkpoint tensors");

  auto take = [&](const std::string& name) {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw ParseError("checkpoint lacks tensor '" + name + "'");
    return it->second;
  };
  auto take_lstm = [&](const std::string& prefix) {
    return LSTMParams{take(prefix + ".w_forget"), take(prefix + ".w_input"), take(prefix + ".w_output"),
                      take(prefix + ".w_cell"),   take(prefix + ".b_forget"), take(prefix + ".b_input"),
                      take(prefix + ".b_output"), take(prefix + ".b_cell")};
  };
  model.source_embedding.matrix = take("source_embedding");
  model.target_embedding.matrix = take("target_embedding");
  model.encoder_forward = take_lstm("encoder_forward");
  model.encoder_backward = take_lstm("encoder_backward");
  model.decoder = take_lstm("decoder");
  model.w_attention = take("w_attention");
  model.w_output = take("w_output");
  model.validate();
  return model;
}

void save_checkpoint(const Seq2SeqModel& model, const std::filesystem::path& path) {
  io::write_file_atomic(path, serialize_checkpoint(model));
}

Seq2SeqModel load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ArtifactError("checkpoint not found: " + path.string());
  return deserialize_checkpoint(io::read_file(path));
}

}  // namespace kglink::model
