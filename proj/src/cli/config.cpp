#include "kglink/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <variant>

#include <json.hpp>

#include "kglink/errors.hpp"
#include "kglink/io.hpp"

namespace kglink::cli {

namespace {

static_assert(std::is_same_v<std::size_t, std::uint64_t>, "seed is stored through the size_t alternative");
using Field = std::variant<double RunConfig::*, std::size_t RunConfig::*, std::string RunConfig::*>;

struct Key {
  const char* name;
  Field field;
};

const Key kKeys[] = {
    {"threshold", &RunConfig::threshold},
    {"candidate_limit", &RunConfig::candidate_limit},
    {"max_tokens", &RunConfig::max_tokens},
    {"max_decode_len", &RunConfig::max_decode_len},
    {"disambiguator_max_source", &RunConfig::disambiguator_max_source},
    {"embed_dim", &RunConfig::embed_dim},
    {"hidden", &RunConfig::hidden},
    {"learning_rate", &RunConfig::learning_rate},
    {"epochs", &RunConfig::epochs},
    {"batch_size", &RunConfig::batch_size},
    {"seed", &RunConfig::seed},
    {"vocab_size", &RunConfig::vocab_size},
    {"min_count", &RunConfig::min_count},
    {"split_ratio", &RunConfig::split_ratio},
    {"mode", &RunConfig::mode},
    {"embeddings", &RunConfig::embeddings},
    {"index", &RunConfig::index},
    {"extractor", &RunConfig::extractor},
    {"disambiguator", &RunConfig::disambiguator},
    {"baseline", &RunConfig::baseline},
};

const Key& find_key(std::string_view name) {
  for (const auto& k : kKeys)
    if (name == k.name) return k;
  throw ConfigError("unknown configuration key '" + std::string(name) + "'");
}

void assign(RunConfig& cfg, const Key& key, const nlohmann::json& v) {
  const std::string name = key.name;
  std::visit(
      [&](auto member) {
        using T = std::remove_reference_t<decltype(cfg.*member)>;
        if constexpr (std::is_same_v<T, std::string>) {
          if (!v.is_string()) throw ConfigError("'" + name + "' must be a string");
          cfg.*member = v.get<std::string>();
        } else if constexpr (std::is_same_v<T, double>) {
          if (!v.is_number()) throw ConfigError("'" + name + "' must be a number");
          cfg.*member = v.get<double>();
        } else {
          if (!v.is_number_unsigned()) throw ConfigError("'" + name + "' must be a non-negative integer");
          cfg.*member = v.get<T>();
        }
      },
      key.field);
}

}  // namespace

void RunConfig::set(std::string_view key_name, std::string_view value) {
  const Key& key = find_key(key_name);
  const std::string name(key_name);
  std::visit(
      [&](auto member) {
        using T = std::remove_reference_t<decltype(this->*member)>;
        if constexpr (std::is_same_v<T, std::string>) {
          this->*member = std::string(value);
        } else {
          T parsed{};
          const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
          if (ec != std::errc() || ptr != value.data() + value.size())
            throw ConfigError("invalid value '" + std::string(value) + "' for '" + name + "'");
          this->*member = parsed;
        }
      },
      key.field);
}

void RunConfig::merge_json(std::string_view document) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  for (const auto& [k, v] : j.items()) assign(*this, find_key(k), v);
}

void RunConfig::merge_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ArtifactError("configuration file not found: " + path.string());
  merge_json(io::read_file(path));
}

void RunConfig::validate() const {
  pipeline().validate();
  link_mode();
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(max_decode_len, "max_decode_len");
  positive(embed_dim, "embed_dim");
  positive(hidden, "hidden");
  positive(batch_size, "batch_size");
  positive(vocab_size, "vocab_size");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be positive");
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw ConfigError("split_ratio must lie strictly between 0 and 1");
}

std::string RunConfig::to_json() const {
  nlohmann::ordered_json j;
  for (const auto& k : kKeys) std::visit([&](auto member) { j[k.name] = this->*member; }, k.field);
  return j.dump();
}

pipeline::PipelineConfig RunConfig::pipeline() const {
  return {threshold, candidate_limit, max_tokens, disambiguator_max_source};
}

pipeline::LinkMode RunConfig::link_mode() const { return pipeline::parse_link_mode(mode); }

pipeline::TaskTrainingConfig RunConfig::training(const std::string& task) const {
  pipeline::TaskTrainingConfig t;
  t.model.embed_dim = embed_dim;
  t.model.hidden = hidden;
  t.model.max_decode_len = max_decode_len;
  if (task == "extractor" || task == "baseline") {
    t.model.max_source_len = max_tokens;
  } else if (task == "disambiguator") {
    t.model.max_source_len = disambiguator_max_source;
  } else {
    throw ConfigError("unknown task '" + task + "' (expected extractor, disambiguator or baseline)");
  }
  t.train.epochs = epochs;
  t.train.batch_size = batch_size;
  t.train.adam.learning_rate = learning_rate;
  t.train.seed = seed;
  t.vocab_size = vocab_size;
  t.min_count = min_count;
  if (!embeddings.empty()) t.embeddings = embeddings;
  return t;
}

}  // namespace kglink::cli
