#include "kglink/text/vocabulary.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "kglink/errors.hpp"

namespace kglink::text {

namespace {

constexpr const char* kReservedNames[kReservedCount] = {"<pad>", "<unk>", "<s>", "</s>", "<sep>"};

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

Vocabulary::Vocabulary() {
  for (const char* name : kReservedNames) add(name);
}

void Vocabulary::add(std::string token) {
  const int id = static_cast<int>(tokens_.size());
  index_.emplace(token, id);
  tokens_.push_back(std::move(token));
}

Vocabulary Vocabulary::build(std::span<const std::vector<std::string>> streams, std::size_t max_size,
                             std::size_t min_count) {
  if (max_size <= static_cast<std::size_t>(kReservedCount)) {
    throw std::invalid_argument("vocabulary max_size must exceed the 5 reserved tokens");
  }
  Vocabulary vocab;
  std::map<std::string, std::size_t> counts;
  for (const auto& stream : streams)
    for (const auto& tok : stream) ++counts[tok];

  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [tok, n] : counts) {
    if (n >= min_count && !vocab.find(tok)) ranked.emplace_back(tok, n);
  }
  // counts is a std::map, so a stable sort on frequency keeps lexicographic order on ties.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  const std::size_t room = max_size - kReservedCount;
  if (ranked.size() > room) ranked.resize(room);
  for (auto& [tok, n] : ranked) vocab.add(tok);
  return vocab;
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  Vocabulary vocab;
  for (auto& tok : tokens) {
    if (vocab.find(tok)) throw std::invalid_argument("duplicate or reserved vocabulary token '" + tok + "'");
    vocab.add(std::move(tok));
  }
  return vocab;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArtifactError("cannot open vocabulary file " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) throw ParseError("empty vocabulary entry", lineno);
    tokens.push_back(line);
  }
  try {
    return from_tokens(std::move(tokens));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

std::string Vocabulary::serialize() const {
  std::string out;
  for (std::size_t i = kReservedCount; i < tokens_.size(); ++i) {
    out += tokens_[i];
    out += '\n';
  }
  return out;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArtifactError("cannot write vocabulary file " + path.string());
  out << serialize();
}

std::optional<int> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int Vocabulary::id(std::string_view token) const { return find(token).value_or(kUnk); }

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw std::out_of_range("token id " + std::to_string(id) + " outside vocabulary of " + std::to_string(size()));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<int> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

std::vector<std::string> Vocabulary::decode(std::span<const int> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int i : ids) out.push_back(token(i));
  return out;
}

std::vector<std::string> Vocabulary::entries() const {
  return {tokens_.begin() + kReservedCount, tokens_.end()};
}

std::uint64_t Vocabulary::fingerprint() const { return fnv1a64(serialize()); }

}  // namespace kglink::text
