#include "kglink/text/embedding.hpp"

#include <charconv>
#include <fstream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "kglink/errors.hpp"

namespace kglink::text {

EmbeddingTable random_embeddings(const Vocabulary& vocab, std::size_t dim, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<double> values(vocab.size() * dim);
  for (double& v : values) v = dist(rng);
  EmbeddingTable table;
  table.matrix = numeric::Tensor::from({vocab.size(), dim}, std::move(values));
  table.frozen_rows.assign(vocab.size(), 0);
  table.dim = dim;
  return table;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

EmbeddingTable load_pretrained(const std::filesystem::path& path, const Vocabulary& vocab, std::size_t dim,
                               std::uint64_t seed, bool freeze) {
  std::ifstream in(path);
  if (!in) throw ArtifactError("cannot open embedding file " + path.string());
  EmbeddingTable table = random_embeddings(vocab, dim, seed);
  auto data = table.matrix.data();
  std::vector<std::uint8_t> seen(vocab.size(), 0);

  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++lineno;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    const std::size_t n = fields.size() - 1;
    if (width == 0) {
      if (n != dim) {
        throw ConfigError("embedding file " + path.string() + " has vectors of width " + std::to_string(n) +
                          ", configured dimension is " + std::to_string(dim));
      }
      width = n;
    } else if (n != width) {
      throw ParseError("expected " + std::to_string(width) + " values, found " + std::to_string(n), lineno);
    }
    row.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const auto f = fields[k + 1];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), row[k]);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError("value '" + std::string(f) + "' is not a number", lineno);
      }
    }
    const auto id = vocab.find(fields[0]);
    if (!id || *id < kReservedCount) continue;
    const auto r = static_cast<std::size_t>(*id);
    if (seen[r]) continue;
    seen[r] = 1;
    std::copy(row.begin(), row.end(), data.begin() + static_cast<std::ptrdiff_t>(r * dim));
    table.frozen_rows[r] = freeze ? 1 : 0;
    ++table.matched;
  }
  const std::size_t open = vocab.size() - kReservedCount;
  table.coverage = open == 0 ? 0.0 : static_cast<double>(table.matched) / static_cast<double>(open);
  return table;
}

}  // namespace kglink::text
