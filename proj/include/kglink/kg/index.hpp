#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kglink/kernels/gemm.hpp"
#include "kglink/kg/similarity.hpp"

namespace kglink::kg {

/// True for "Q" followed by one or more ASCII digits.
bool is_qid(std::string_view id);

/// Numeric order for well-formed QIDs (Q2 < Q10), byte order otherwise;
/// QIDs sort before anything else.
bool qid_less(std::string_view a, std::string_view b);

struct QidLess {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const { return qid_less(a, b); }
};

struct EntityRecord {
  std::string id;
  std::string label;
  std::vector<std::string> aliases;

  bool operator==(const EntityRecord&) const = default;
};

enum class NameKind : std::uint8_t { label = 0, alias = 1 };

const char* to_string(NameKind kind);

/// One owner of a normalized string.
struct Posting {
  std::uint32_t entity;  // position in KGIndex::entities()
  NameKind kind;
  std::string original;

  bool operator==(const Posting&) const = default;
};

struct CandidateHit {
  std::string id;
  std::string matched;
  NameKind kind;
  double score;

  bool operator==(const CandidateHit&) const = default;
};

struct SearchOptions {
  double threshold = 0.85;
  std::size_t limit = 64;
  kernels::Backend backend = kernels::Backend::automatic;
};

/// Immutable label/alias index over a set of entities. Safe for concurrent
/// readers.
class KGIndex {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  KGIndex() = default;

  std::size_t entity_count() const noexcept { return records_.size(); }
  /// One per label plus one per alias, over all entities.
  std::size_t posting_count() const noexcept { return posting_count_; }
  /// Distinct normalized strings.
  std::size_t string_count() const noexcept { return normalized_.size(); }

  /// Entities in id order.
  std::span<const EntityRecord> entities() const noexcept { return records_; }
  const EntityRecord* find(std::string_view id) const;

  /// Owners of an exact normalized string, in id order.
  std::span<const Posting> postings(std::string_view normalized) const;

  /// Entities whose label or some alias scores at least `threshold` against
  /// `surface`. Each entity appears once, with its best-scoring name (a label
  /// beats an alias on equal score). Sorted by score descending, then id.
  /// Throws std::invalid_argument on an empty surface, a threshold outside
  /// [0, 1] or a zero limit.
  std::vector<CandidateHit> search(std::string_view surface, const SearchOptions& options = {}) const;

  /// Id owning `label` after normalization. Labels take precedence over
  /// aliases; among several owners the smallest id wins.
  std::optional<std::string> label_to_id(std::string_view label) const;

  std::string serialize() const;
  /// Throws ParseError on bad magic, version or structure.
  static KGIndex deserialize(std::string_view bytes);
  void save(const std::filesystem::path& path) const;
  /// Throws ArtifactError when the file is missing.
  static KGIndex load(const std::filesystem::path& path);

 private:
  friend class KGIndexBuilder;

  ScoredText scored(std::string_view normalized) const;
  std::vector<std::uint32_t> candidate_strings(const ScoredText& query, double threshold) const;
  void build_lookups();

  std::vector<EntityRecord> records_;
  std::unordered_map<std::string, std::uint32_t> record_pos_;
  std::size_t posting_count_ = 0;

  // Parallel arrays over distinct normalized strings, sorted bytewise.
  std::vector<std::string> normalized_;
  std::vector<std::vector<Posting>> postings_;
  std::vector<ScoredText> texts_;

  std::unordered_map<std::string, std::uint32_t> string_pos_;
  std::unordered_map<std::string, std::uint32_t> token_ids_;
  std::vector<std::vector<std::uint32_t>> strings_by_token_;
  std::vector<std::vector<std::uint32_t>> strings_by_length_;
};

/// Collects records (last write per id wins) and freezes them into a KGIndex.
class KGIndexBuilder {
 public:
  /// Aliases are de-duplicated and empty ones dropped. Returns false when an
  /// entity with the same id was already present and got replaced. Throws
  /// std::invalid_argument on an empty id or label.
  bool add(EntityRecord record);

  std::size_t size() const noexcept { return records_.size(); }
  KGIndex build() const;

 private:
  std::map<std::string, EntityRecord, QidLess> records_;
};

}  // namespace kglink::kg
