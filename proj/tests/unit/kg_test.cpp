#include <gtest/gtest.h>
#include <omp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "kglink/errors.hpp"
#include "kglink/kg/dump.hpp"
#include "kglink/kg/index.hpp"
#include "kglink/kg/normalize.hpp"
#include "kglink/kg/similarity.hpp"
#include "kglink/kg/wikidata.hpp"
#include "kglink/text/utf8.hpp"
#include "support/kg_generator.hpp"

namespace {

using namespace kglink;
using namespace kglink::kg;

namespace gen = kglink::testing;

const std::filesystem::path kMiniKg = std::filesystem::path(KGLINK_FIXTURE_DIR) / "mini_kg.tsv";

// ---- independent scoring oracle -------------------------------------------

std::size_t oracle_levenshtein(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
  return d[a.size()][b.size()];
}

double oracle_score(const std::string& na, const std::string& nb) {
  if (na == nb) return 1.0;
  std::map<std::string, int> ca, cb;
  std::istringstream sa(na), sb(nb);
  std::size_t total = 0, common = 0;
  for (std::string w; sa >> w; ++total) ++ca[w];
  for (std::string w; sb >> w; ++total) ++cb[w];
  for (const auto& [w, n] : ca)
    if (auto it = cb.find(w); it != cb.end()) common += static_cast<std::size_t>(std::min(n, it->second));
  const double dice = total ? 2.0 * static_cast<double>(common) / static_cast<double>(total) : 1.0;
  const auto ua = text::to_u32(na), ub = text::to_u32(nb);
  const std::size_t longest = std::max(ua.size(), ub.size());
  const double edit = 1.0 - static_cast<double>(oracle_levenshtein(ua, ub)) / static_cast<double>(longest);
  return std::max(dice, edit);
}

// Scores every name of every entity; no candidate pruning.
std::vector<CandidateHit> exhaustive_search(const std::vector<EntityRecord>& records, const std::string& surface,
                                            double threshold, std::size_t limit) {
  const std::string nq = normalize(surface);
  std::map<std::string, CandidateHit, QidLess> best;
  for (const auto& r : records) {
    std::vector<std::pair<std::string, NameKind>> names{{r.label, NameKind::label}};
    for (const auto& a : r.aliases) names.emplace_back(a, NameKind::alias);
    for (const auto& [name, kind] : names) {
      const double s = oracle_score(nq, normalize(name));
      if (s < threshold) continue;
      CandidateHit hit{r.id, name, kind, s};
      auto it = best.find(r.id);
      if (it == best.end()) {
        best.emplace(r.id, hit);
        continue;
      }
      auto& cur = it->second;
      const bool better = s > cur.score ||
                          (s == cur.score && (kind != cur.kind ? kind == NameKind::label : name < cur.matched));
      if (better) cur = hit;
    }
  }
  std::vector<CandidateHit> out;
  for (auto& [id, hit] : best) out.push_back(hit);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
  if (out.size() > limit) out.resize(limit);
  return out;
}

std::vector<std::string> ids_of(const std::vector<CandidateHit>& hits) {
  std::vector<std::string> ids;
  for (const auto& h : hits) ids.push_back(h.id);
  return ids;
}

// ---- normalize --------------------------------------------------------------

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize("Custom-Chip"), "custom chip");
  EXPECT_EQ(normalize(""), "");
  EXPECT_EQ(normalize("  ASIC\t"), "asic");
  EXPECT_EQ(normalize("L'Heureux"), "l heureux");
  EXPECT_EQ(normalize("Köln,  Straße!"), "köln strasse");
  EXPECT_EQ(normalize("\xEF\xBC\xA1\xEF\xBC\xA2\xEF\xBC\xA3"), "abc");  // full-width ABC
  EXPECT_EQ(normalize("5,10-methylene-THF"), "5 10 methylene thf");
  EXPECT_EQ(normalize("--"), "");
}

TEST(Normalize, Idempotent) {
  std::mt19937_64 rng(40);
  const std::vector<std::string> pieces{"a", "Z", " ", "-", "'", "é", "e\xCC\x81", "\xCC\x81", "ß", "İ", "ﬁ",
                                        "Ω", "\xC2\xA0", "3", "½", "!", "東京", "\t", "ǅ", ".", "Ⅻ"};
  for (int trial = 0; trial < 2000; ++trial) {
    std::string s;
    const auto n = rng() % 10;
    for (std::size_t i = 0; i < n; ++i) s += pieces[rng() % pieces.size()];
    const auto once = normalize(s);
    EXPECT_EQ(normalize(once), once) << s;
    EXPECT_EQ(once.find("  "), std::string::npos);
    if (!once.empty()) {
      EXPECT_NE(once.front(), ' ');
      EXPECT_NE(once.back(), ' ');
    }
  }
}

// ---- similarity kernels ------------------------------------------------------

TEST(Similarity, EditDistanceAgainstFullMatrix) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 500; ++trial) {
    std::u32string a, b;
    for (auto n = rng() % 9; n > 0; --n) a.push_back(U'a' + static_cast<char32_t>(rng() % 4));
    for (auto n = rng() % 9; n > 0; --n) b.push_back(U'a' + static_cast<char32_t>(rng() % 4));
    EXPECT_EQ(levenshtein(a, b), oracle_levenshtein(a, b));
    EXPECT_EQ(levenshtein(a, b), levenshtein(b, a));
  }
  EXPECT_EQ(levenshtein(U"kitten", U"sitting"), 3u);
  EXPECT_DOUBLE_EQ(edit_similarity(U"lheureux", U"heureux"), 0.875);
}

TEST(Similarity, DiceCountsMultisets) {
  const std::vector<std::uint32_t> a{1, 1, 2}, b{1, 2, 2, 3};
  EXPECT_DOUBLE_EQ(dice(a, b), 2.0 * 2 / 7);
  EXPECT_DOUBLE_EQ(dice(std::vector<std::uint32_t>{}, std::vector<std::uint32_t>{}), 1.0);
  EXPECT_DOUBLE_EQ(dice(a, std::vector<std::uint32_t>{}), 0.0);
}

TEST(Similarity, OpenMpScoringMatchesSerialBitwise) {
  std::mt19937_64 rng(42);
  auto g = gen::generate_kg(800, rng);
  auto index = gen::build_index(g.records);
  std::vector<ScoredText> texts;
  for (const auto& r : g.records) {
    ScoredText t{text::to_u32(normalize(r.label)), {}};
    for (auto c : t.chars) t.tokens.push_back(static_cast<std::uint32_t>(c));  // arbitrary sorted ids
    std::sort(t.tokens.begin(), t.tokens.end());
    texts.push_back(std::move(t));
  }
  std::vector<std::uint32_t> cand(texts.size());
  for (std::uint32_t i = 0; i < cand.size(); ++i) cand[i] = i;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
  for (int q = 0; q < 10; ++q) {
    const auto& query = texts[rng() % texts.size()];
    std::vector<double> s1(cand.size()), s2(cand.size());
    serial::score_candidates(query, texts, cand, s1);
    omp::score_candidates(query, texts, cand, s2);
    EXPECT_EQ(s1, s2);
  }
  omp_set_num_threads(saved);
}

// ---- ingest -------------------------------------------------------------------

TEST(Ingest, AliasEnrichedEntityIsFullyRetrievable) {
  std::istringstream in("Q217302\tapplication-specific integrated circuit\tASIC|Custom Chip|Custom-Chip\n");
  auto [index, stats] = ingest_dump(in);
  EXPECT_EQ(stats.entities, 1u);
  EXPECT_EQ(index.posting_count(), 4u);
  for (const char* s : {"application-specific integrated circuit", "ASIC", "Custom Chip", "Custom-Chip"}) {
    auto hits = index.search(s, {1.0, 64});
    ASSERT_EQ(hits.size(), 1u) << s;
    EXPECT_EQ(hits[0].id, "Q217302");
    EXPECT_EQ(hits[0].score, 1.0);
  }
}

TEST(Ingest, EmptyFile) {
  std::istringstream in("");
  auto [index, stats] = ingest_dump(in);
  EXPECT_EQ(index.entity_count(), 0u);
  EXPECT_EQ(stats.entities, 0u);
  EXPECT_TRUE(index.search("anything").empty());
}

TEST(Ingest, SyntheticBookkeeping) {
  std::mt19937_64 rng(43);
  auto g = gen::generate_kg(1000, rng);
  std::stringstream dump;
  for (const auto& r : g.records) dump << format_dump_line(r) << '\n';
  auto [index, stats] = ingest_dump(dump);
  EXPECT_EQ(stats.entities, 1000u);
  EXPECT_EQ(index.entity_count(), 1000u);
  EXPECT_EQ(index.posting_count(), g.postings);
  EXPECT_EQ(stats.duplicate_ids, 0u);
  for (const auto& r : g.records) ASSERT_NE(index.find(r.id), nullptr);
  EXPECT_EQ(*index.find(g.records[7].id), g.records[7]);
}

TEST(Ingest, SkipsUnlabelledAndCountsDuplicates) {
  std::istringstream in("Q1\tfirst\t\n\nQ2\t\tonly alias\nQ1\tsecond\tx|y\nQ3\tthird\n");
  auto [index, stats] = ingest_dump(in);
  EXPECT_EQ(stats.lines, 5u);
  EXPECT_EQ(stats.entities, 2u);
  EXPECT_EQ(stats.skipped_no_label, 1u);
  EXPECT_EQ(stats.duplicate_ids, 1u);
  EXPECT_EQ(index.find("Q1")->label, "second");
  EXPECT_EQ(index.find("Q2"), nullptr);
  EXPECT_FALSE(index.label_to_id("first").has_value());
}

TEST(Ingest, MalformedLineReportsLineNumber) {
  for (const char* bad : {"Q1\tok\n\nQ2 no tabs\n", "Q1\tok\n\nP31\tinstance of\n", "Q1\tok\n\nQ2\ta\tb\tc\n",
                          "Q1\tok\n\nQ2\tname\tbad\\escape\n"}) {
    std::istringstream in(bad);
    try {
      ingest_dump(in);
      ADD_FAILURE() << "accepted: " << bad;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), 3u) << bad;
    }
  }
}

TEST(Ingest, EscapesRoundTrip) {
  EntityRecord r{"Q5", "back\\slash | bar", {"a|b", "c\\", "plain"}};
  const auto line = format_dump_line(r);
  EXPECT_EQ(line, "Q5\tback\\\\slash | bar\ta\\|b|c\\\\|plain");
  EXPECT_EQ(parse_dump_line(line, 1), r);
  EXPECT_FALSE(parse_dump_line("", 1).has_value());
  EXPECT_FALSE(parse_dump_line("\r", 1).has_value());
}

TEST(Ingest, MissingFileIsArtifactError) {
  EXPECT_THROW(ingest_dump(std::filesystem::path("/nonexistent/dump.tsv")), ArtifactError);
}

// ---- search -------------------------------------------------------------------

TEST(Search, AsicResolvesThroughAlias) {
  auto index = ingest_dump(kMiniKg).index;
  auto hits = index.search("ASIC");
  ASSERT_FALSE(hits.empty());
  EXPECT_EQ(hits[0], (CandidateHit{"Q217302", "ASIC", NameKind::alias, 1.0}));
}

TEST(Search, HeureuxIsAmbiguous) {
  auto index = ingest_dump(kMiniKg).index;
  const auto ids = ids_of(index.search("Heureux"));
  EXPECT_NE(std::find(ids.begin(), ids.end(), "Q3134963"), ids.end());
  EXPECT_NE(std::find(ids.begin(), ids.end(), "Q56539239"), ids.end());
}

TEST(Search, HeureuxLabelsAloneNeedALowerThreshold) {
  auto index = gen::build_index({{"Q3134963", "French ship Heureux", {}}, {"Q56539239", "L'Heureux", {}}});
  EXPECT_TRUE(index.search("Heureux").empty());
  EXPECT_EQ(ids_of(index.search("Heureux", {0.5, 64})), (std::vector<std::string>{"Q56539239", "Q3134963"}));
}

TEST(Search, GibberishFindsNothing) {
  auto index = ingest_dump(kMiniKg).index;
  EXPECT_TRUE(index.search("zzqqx").empty());
}

TEST(Search, RejectsBadArguments) {
  auto index = ingest_dump(kMiniKg).index;
  EXPECT_THROW(index.search(""), std::invalid_argument);
  EXPECT_THROW(index.search("x", {1.5, 64}), std::invalid_argument);
  EXPECT_THROW(index.search("x", {0.85, 0}), std::invalid_argument);
}

TEST(Search, MatchesExhaustiveScoring) {
  std::mt19937_64 rng(44);
  for (int kg_trial = 0; kg_trial < 5; ++kg_trial) {
    auto g = gen::generate_kg(300, rng);
    auto index = gen::build_index(g.records);
    for (int q = 0; q < 60; ++q) {
      const auto& r = g.records[rng() % g.records.size()];
      const std::string query = q % 3 == 0 ? gen::random_name(rng) : gen::mutate_name(r.label, rng);
      const double thresholds[] = {0.0, 0.5, 0.7, 0.85, 1.0};
      const double t = thresholds[rng() % 5];
      const std::size_t limit = q % 2 ? 64 : 5;
      auto got = index.search(query, {t, limit, kernels::Backend::serial});
      auto want = exhaustive_search(g.records, query, t, limit);
      ASSERT_EQ(got.size(), want.size()) << query << " t=" << t;
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].id, want[i].id) << query;
        EXPECT_EQ(got[i].matched, want[i].matched) << query;
        EXPECT_EQ(got[i].kind, want[i].kind);
        EXPECT_NEAR(got[i].score, want[i].score, 1e-12);
      }
      EXPECT_EQ(index.search(query, {t, limit, kernels::Backend::openmp}), got);
    }
  }
}

TEST(Search, Properties) {
  std::mt19937_64 rng(45);
  auto g = gen::generate_kg(400, rng);
  auto index = gen::build_index(g.records);
  for (const auto& r : g.records) {
    // every ingested string finds its entity at threshold 1
    std::vector<std::string> names{r.label};
    names.insert(names.end(), r.aliases.begin(), r.aliases.end());
    for (const auto& n : names) {
      const auto ids = ids_of(index.search(n, {1.0, 1000}));
      EXPECT_NE(std::find(ids.begin(), ids.end(), r.id), ids.end()) << n;
    }
    auto hits = index.search(r.label, {0.85, 1000});
    auto self = std::find_if(hits.begin(), hits.end(), [&](const auto& h) { return h.id == r.id; });
    ASSERT_NE(self, hits.end());
    EXPECT_EQ(self->score, 1.0);
  }
  for (int q = 0; q < 200; ++q) {
    const auto query = gen::mutate_name(g.records[rng() % g.records.size()].label, rng);
    const double t1 = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
    const double t2 = std::uniform_real_distribution<double>(t1, 1.0)(rng);
    auto low = index.search(query, {t1, 1000}), high = index.search(query, {t2, 1000});
    auto low_ids = ids_of(low), high_ids = ids_of(high);
    std::sort(low_ids.begin(), low_ids.end());
    std::sort(high_ids.begin(), high_ids.end());
    EXPECT_TRUE(std::includes(low_ids.begin(), low_ids.end(), high_ids.begin(), high_ids.end()));
    for (const auto& h : low) {
      EXPECT_GE(h.score, t1);
      EXPECT_LE(h.score, 1.0);
      EXPECT_NE(index.find(h.id), nullptr);
    }
    for (std::size_t i = 1; i < low.size(); ++i) {
      EXPECT_TRUE(low[i - 1].score > low[i].score ||
                  (low[i - 1].score == low[i].score && qid_less(low[i - 1].id, low[i].id)));
    }
  }
}

// ---- label_to_id ----------------------------------------------------------------

TEST(LabelToId, Examples) {
  auto index = ingest_dump(kMiniKg).index;
  EXPECT_EQ(index.label_to_id("Hamburg"), "Q1055");
  EXPECT_EQ(index.label_to_id("application specific integrated circuit"), "Q217302");
  EXPECT_EQ(index.label_to_id("Catalan"), "Q595266");
  EXPECT_FALSE(index.label_to_id("Atlantis").has_value());
}

TEST(LabelToId, SharedLabelPicksSmallestNumericId) {
  auto index = gen::build_index({{"Q10", "Mercury", {}}, {"Q9", "Mercury", {}}, {"Q2", "x", {"Mercury"}}});
  EXPECT_EQ(index.label_to_id("mercury"), "Q9");
  EXPECT_EQ(index.label_to_id("x"), "Q2");
}

TEST(QidOrder, NumericNotLexicographic) {
  EXPECT_TRUE(qid_less("Q9", "Q10"));
  EXPECT_FALSE(qid_less("Q10", "Q9"));
  EXPECT_TRUE(qid_less("Q99999", "Qabc"));
  EXPECT_TRUE(is_qid("Q1"));
  EXPECT_FALSE(is_qid("Q"));
  EXPECT_FALSE(is_qid("P31"));
}

// ---- serialization ------------------------------------------------------------------

TEST(IndexFile, DeterministicAndRoundTrips) {
  std::mt19937_64 rng(46);
  auto g = gen::generate_kg(500, rng);
  std::stringstream d1, d2;
  for (const auto& r : g.records) d1 << format_dump_line(r) << '\n';
  auto shuffled = g.records;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  for (const auto& r : shuffled) d2 << format_dump_line(r) << '\n';
  const auto bytes = ingest_dump(d1).index.serialize();
  EXPECT_EQ(ingest_dump(d2).index.serialize(), bytes);

  auto loaded = KGIndex::deserialize(bytes);
  EXPECT_EQ(loaded.serialize(), bytes);
  auto original = gen::build_index(g.records);
  for (int q = 0; q < 50; ++q) {
    const auto query = gen::mutate_name(g.records[rng() % g.records.size()].label, rng);
    EXPECT_EQ(loaded.search(query), original.search(query));
  }
}

TEST(IndexFile, RejectsCorruption) {
  const auto bytes = ingest_dump(kMiniKg).index.serialize();
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(KGIndex::deserialize(bad_magic), ParseError);
  auto bad_version = bytes;
  bad_version[8] = 2;
  EXPECT_THROW(KGIndex::deserialize(bad_version), ParseError);
  EXPECT_THROW(KGIndex::deserialize(bytes.substr(0, bytes.size() / 2)), ParseError);
  EXPECT_THROW(KGIndex::deserialize(bytes + "x"), ParseError);
}

TEST(IndexFile, SaveAndLoad) {
  const auto path = std::filesystem::temp_directory_path() / "kglink_kg_test.idx";
  auto index = ingest_dump(kMiniKg).index;
  index.save(path);
  EXPECT_EQ(KGIndex::load(path).serialize(), index.serialize());
  std::filesystem::remove(path);
  EXPECT_THROW(KGIndex::load(path), ArtifactError);
}

// ---- Wikidata conversion -----------------------------------------------------------------

TEST(Wikidata, StreamsItemsWithEnglishNames) {
  std::istringstream in(R"([
{"id":"Q1055","type":"item","labels":{"en":{"language":"en","value":"Hamburg"},"de":{"language":"de","value":"Hamburg"}},"aliases":{"en":[{"language":"en","value":"Free and Hanseatic City of Hamburg"},{"language":"en","value":"HH|city"}]}},
{"id":"P31","type":"property","labels":{"en":{"language":"en","value":"instance of"}}},
{"id":"Q5","type":"item","labels":{"de":{"language":"de","value":"Mensch"}}},
{"id":"Q150","type":"item","labels":{"en":{"language":"en","value":"French"}}}
]
)");
  std::ostringstream out;
  auto stats = convert_wikidata(in, out);
  EXPECT_EQ(stats.written, 2u);
  EXPECT_EQ(stats.skipped_not_item, 1u);
  EXPECT_EQ(stats.skipped_no_label, 1u);
  EXPECT_EQ(out.str(), "Q1055\tHamburg\tFree and Hanseatic City of Hamburg|HH\\|city\nQ150\tFrench\t\n");
  std::istringstream back(out.str());
  auto index = ingest_dump(back).index;
  EXPECT_EQ(index.find("Q1055")->aliases[1], "HH|city");
}

TEST(Wikidata, InvalidJsonReportsLine) {
  std::istringstream in("[\n{\"id\":\"Q1\"},\n{broken\n");
  std::ostringstream out;
  try {
    convert_wikidata(in, out);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

}  // namespace
