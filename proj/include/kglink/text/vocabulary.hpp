#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kglink::text {

/// Reserved ids, always 0..4 in this order.
enum SpecialToken : int { kPad = 0, kUnk = 1, kSos = 2, kEos = 3, kSep = 4 };
inline constexpr int kReservedCount = 5;

/// Bijection between tokens and dense integer ids, with the five reserved
/// tokens in front. Immutable once built.
class Vocabulary {
 public:
  /// Only the reserved tokens.
  Vocabulary();

  /// Tokens occurring at least `min_count` times, most frequent first, ties
  /// in byte-lexicographic order, capped so that size() <= max_size.
  /// Requires max_size > 5.
  static Vocabulary build(std::span<const std::vector<std::string>> streams, std::size_t max_size,
                          std::size_t min_count = 1);

  /// Ids assigned in order starting at 5. Throws std::invalid_argument on a
  /// duplicate or a reserved token.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  /// One non-reserved token per line; line i (0-based) holds id i + 5.
  static Vocabulary load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  std::string serialize() const;

  std::size_t size() const noexcept { return tokens_.size(); }
  std::optional<int> find(std::string_view token) const;
  /// Id of `token`, or kUnk.
  int id(std::string_view token) const;
  /// Throws std::out_of_range for an unknown id.
  const std::string& token(int id) const;

  std::vector<int> encode(std::span<const std::string> tokens) const;
  std::vector<std::string> decode(std::span<const int> ids) const;

  /// Non-reserved tokens in id order.
  std::vector<std::string> entries() const;

  /// FNV-1a digest of serialize(); used to pair checkpoints with vocabularies.
  std::uint64_t fingerprint() const;

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  void add(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace kglink::text
