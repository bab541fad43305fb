#include "kglink/kg/index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "kglink/binary.hpp"
#include "kglink/errors.hpp"
#include "kglink/io.hpp"
#include "kglink/kg/normalize.hpp"
#include "kglink/text/utf8.hpp"

namespace kglink::kg {

namespace {

constexpr char kMagic[8] = {'K', 'G', 'L', 'I', 'N', 'D', 'E', 'X'};
constexpr std::uint32_t kUnknownToken = std::numeric_limits<std::uint32_t>::max();

bool posting_less(const Posting& a, const Posting& b) {
  if (a.entity != b.entity) return a.entity < b.entity;
  if (a.kind != b.kind) return a.kind < b.kind;
  return a.original < b.original;
}

// Strict preference between two names of the same entity at equal score.
bool preferred_name(NameKind kind, const std::string& original, NameKind other_kind, const std::string& other) {
  if (kind != other_kind) return kind == NameKind::label;
  return original < other;
}

}  // namespace

bool is_qid(std::string_view id) {
  if (id.size() < 2 || id[0] != 'Q') return false;
  return std::all_of(id.begin() + 1, id.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool qid_less(std::string_view a, std::string_view b) {
  const bool qa = is_qid(a), qb = is_qid(b);
  if (qa != qb) return qa;
  if (!qa) return a < b;
  auto digits = [](std::string_view s) {
    s.remove_prefix(1);
    const auto nz = s.find_first_not_of('0');
    return nz == std::string_view::npos ? std::string_view{} : s.substr(nz);
  };
  const auto da = digits(a), db = digits(b);
  if (da.size() != db.size()) return da.size() < db.size();
  if (da != db) return da < db;
  return a < b;  // same number, different zero padding
}

const char* to_string(NameKind kind) { return kind == NameKind::label ? "label" : "alias"; }

const EntityRecord* KGIndex::find(std::string_view id) const {
  const auto it = record_pos_.find(std::string(id));
  return it == record_pos_.end() ? nullptr : &records_[it->second];
}

std::span<const Posting> KGIndex::postings(std::string_view normalized) const {
  const auto it = string_pos_.find(std::string(normalized));
  if (it == string_pos_.end()) return {};
  return postings_[it->second];
}

ScoredText KGIndex::scored(std::string_view normalized) const {
  ScoredText t;
  t.chars = text::to_u32(normalized);
  for (const auto& tok : split_normalized(normalized)) {
    const auto it = token_ids_.find(tok);
    t.tokens.push_back(it == token_ids_.end() ? kUnknownToken : it->second);
  }
  std::sort(t.tokens.begin(), t.tokens.end());
  return t;
}

// Every string that can reach `threshold`: a positive Dice score needs a
// shared token, and an edit similarity of t needs the shorter length to be at
// least t times the longer one.
std::vector<std::uint32_t> KGIndex::candidate_strings(const ScoredText& query, double threshold) const {
  std::vector<std::uint32_t> out;
  if (threshold <= 0.0) {
    out.resize(normalized_.size());
    for (std::uint32_t i = 0; i < out.size(); ++i) out[i] = i;
    return out;
  }
  for (std::uint32_t tok : query.tokens) {
    if (tok == kUnknownToken) continue;
    const auto& list = strings_by_token_[tok];
    out.insert(out.end(), list.begin(), list.end());
  }
  const double len = static_cast<double>(query.chars.size());
  const auto lo = static_cast<std::size_t>(std::floor(threshold * len));
  const auto hi = std::min(strings_by_length_.empty() ? std::size_t{0} : strings_by_length_.size() - 1,
                           static_cast<std::size_t>(std::ceil(len / threshold)));
  for (std::size_t l = lo; l <= hi && l < strings_by_length_.size(); ++l) {
    const auto& list = strings_by_length_[l];
    out.insert(out.end(), list.begin(), list.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<CandidateHit> KGIndex::search(std::string_view surface, const SearchOptions& options) const {
  if (surface.empty()) throw std::invalid_argument("search: empty surface form");
  if (!(options.threshold >= 0.0 && options.threshold <= 1.0))
    throw std::invalid_argument("search: threshold must lie in [0, 1]");
  if (options.limit == 0) throw std::invalid_argument("search: limit must be positive");

  const ScoredText query = scored(normalize(surface));
  const auto candidates = candidate_strings(query, options.threshold);
  std::vector<double> scores(candidates.size());
  score_candidates(query, texts_, candidates, scores, options.backend);

  struct Best {
    double score;
    const Posting* posting;
  };
  std::unordered_map<std::uint32_t, Best> best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (scores[i] < options.threshold) continue;
    for (const Posting& p : postings_[candidates[i]]) {
      auto [it, inserted] = best.try_emplace(p.entity, Best{scores[i], &p});
      if (inserted) continue;
      Best& b = it->second;
      if (scores[i] > b.score ||
          (scores[i] == b.score && preferred_name(p.kind, p.original, b.posting->kind, b.posting->original)))
        b = Best{scores[i], &p};
    }
  }

  std::vector<std::pair<std::uint32_t, Best>> ranked(best.begin(), best.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second.score != b.second.score) return a.second.score > b.second.score;
    return a.first < b.first;
  });
  if (ranked.size() > options.limit) ranked.resize(options.limit);

  std::vector<CandidateHit> hits;
  hits.reserve(ranked.size());
  for (const auto& [entity, b] : ranked)
    hits.push_back({records_[entity].id, b.posting->original, b.posting->kind, b.score});
  return hits;
}

std::optional<std::string> KGIndex::label_to_id(std::string_view label) const {
  const auto owners = postings(normalize(label));
  if (owners.empty()) return std::nullopt;
  const Posting* pick = &owners.front();
  for (const Posting& p : owners) {
    if (p.kind == NameKind::label) {
      pick = &p;
      break;
    }
  }
  return records_[pick->entity].id;
}

void KGIndex::build_lookups() {
  record_pos_.clear();
  for (std::uint32_t i = 0; i < records_.size(); ++i) record_pos_.emplace(records_[i].id, i);

  string_pos_.clear();
  std::set<std::string> vocabulary;
  for (std::uint32_t i = 0; i < normalized_.size(); ++i) {
    string_pos_.emplace(normalized_[i], i);
    for (auto& tok : split_normalized(normalized_[i])) vocabulary.insert(std::move(tok));
  }
  token_ids_.clear();
  for (const auto& tok : vocabulary) token_ids_.emplace(tok, static_cast<std::uint32_t>(token_ids_.size()));

  texts_.clear();
  strings_by_token_.assign(token_ids_.size(), {});
  strings_by_length_.clear();
  for (std::uint32_t i = 0; i < normalized_.size(); ++i) {
    ScoredText t = scored(normalized_[i]);
    std::vector<std::uint32_t> distinct = t.tokens;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (std::uint32_t tok : distinct) strings_by_token_[tok].push_back(i);
    if (strings_by_length_.size() <= t.chars.size()) strings_by_length_.resize(t.chars.size() + 1);
    strings_by_length_[t.chars.size()].push_back(i);
    texts_.push_back(std::move(t));
  }
}

std::string KGIndex::serialize() const {
  std::string out(kMagic, sizeof(kMagic));
  binary::put<std::uint32_t>(out, kFormatVersion);
  binary::put<std::uint64_t>(out, records_.size());
  for (const auto& r : records_) {
    binary::put_string(out, r.id);
    binary::put_string(out, r.label);
    binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(r.aliases.size()));
    for (const auto& a : r.aliases) binary::put_string(out, a);
  }
  binary::put<std::uint64_t>(out, normalized_.size());
  for (std::size_t i = 0; i < normalized_.size(); ++i) {
    binary::put_string(out, normalized_[i]);
    binary::put<std::uint32_t>(out, static_cast<std::uint32_t>(postings_[i].size()));
    for (const auto& p : postings_[i]) {
      binary::put<std::uint32_t>(out, p.entity);
      binary::put<std::uint8_t>(out, static_cast<std::uint8_t>(p.kind));
      binary::put_string(out, p.original);
    }
  }
  return out;
}

KGIndex KGIndex::deserialize(std::string_view bytes) {
  binary::Reader in(bytes, "index file");
  if (in.take(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic)))
    throw ParseError("not an index file (bad magic)");
  const auto version = in.get<std::uint32_t>();
  if (version != kFormatVersion)
    throw ParseError("index format version " + std::to_string(version) + " is not supported (expected " +
                     std::to_string(kFormatVersion) + ")");

  KGIndex index;
  const auto entities = in.get<std::uint64_t>();
  if (entities > in.remaining()) throw ParseError("index file is truncated");
  index.records_.reserve(entities);
  for (std::uint64_t i = 0; i < entities; ++i) {
    EntityRecord r;
    r.id = in.get_string();
    r.label = in.get_string();
    const auto n = in.get<std::uint32_t>();
    for (std::uint32_t k = 0; k < n; ++k) r.aliases.push_back(in.get_string());
    if (!index.records_.empty() && !qid_less(index.records_.back().id, r.id))
      throw ParseError("index entities are not in id order");
    index.posting_count_ += 1 + r.aliases.size();
    index.records_.push_back(std::move(r));
  }

  const auto strings = in.get<std::uint64_t>();
  if (strings > in.remaining()) throw ParseError("index file is truncated");
  std::size_t postings_seen = 0;
  for (std::uint64_t i = 0; i < strings; ++i) {
    std::string key = in.get_string();
    if (!index.normalized_.empty() && !(index.normalized_.back() < key))
      throw ParseError("index strings are not sorted");
    std::vector<Posting> list(in.get<std::uint32_t>());
    for (auto& p : list) {
      p.entity = in.get<std::uint32_t>();
      const auto kind = in.get<std::uint8_t>();
      p.original = in.get_string();
      if (p.entity >= index.records_.size() || kind > 1) throw ParseError("index posting is out of range");
      p.kind = static_cast<NameKind>(kind);
    }
    postings_seen += list.size();
    index.normalized_.push_back(std::move(key));
    index.postings_.push_back(std::move(list));
  }
  if (!in.done()) throw ParseError("trailing bytes after index data");
  if (postings_seen != index.posting_count_) throw ParseError("index posting count disagrees with entity names");
  index.build_lookups();
  return index;
}

void KGIndex::save(const std::filesystem::path& path) const { io::write_file_atomic(path, serialize()); }

KGIndex KGIndex::load(const std::filesystem::path& path) { return deserialize(io::read_file(path)); }

bool KGIndexBuilder::add(EntityRecord record) {
  if (record.id.empty()) throw std::invalid_argument("entity id is empty");
  if (record.label.empty()) throw std::invalid_argument("entity " + record.id + " has no label");
  std::vector<std::string> aliases;
  for (auto& a : record.aliases)
    if (!a.empty() && std::find(aliases.begin(), aliases.end(), a) == aliases.end()) aliases.push_back(std::move(a));
  record.aliases = std::move(aliases);
  const std::string id = record.id;
  return records_.insert_or_assign(id, std::move(record)).second;
}

KGIndex KGIndexBuilder::build() const {
  KGIndex index;
  std::map<std::string, std::vector<Posting>> by_key;
  for (const auto& [id, record] : records_) {
    const auto entity = static_cast<std::uint32_t>(index.records_.size());
    by_key[normalize(record.label)].push_back({entity, NameKind::label, record.label});
    for (const auto& a : record.aliases) by_key[normalize(a)].push_back({entity, NameKind::alias, a});
    index.posting_count_ += 1 + record.aliases.size();
    index.records_.push_back(record);
  }
  for (auto& [key, list] : by_key) {
    std::sort(list.begin(), list.end(), posting_less);
    index.normalized_.push_back(key);
    index.postings_.push_back(std::move(list));
  }
  index.build_lookups();
  return index;
}

}  // namespace kglink::kg
