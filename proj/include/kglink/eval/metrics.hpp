#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace kglink::eval {

struct GoldMention {
  std::string surface;
  std::string qid;
};

/// An empty surface means the system named only the entity (baseline mode).
struct PredictedMention {
  std::string surface;
  std::string qid;
  double decode_score = 0.0;
};

struct Counts {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  std::size_t wrong_entity = 0;      // false positive on a gold surface
  std::size_t spurious_mention = 0;  // false positive on no gold surface
  std::size_t missed_mention = 0;    // false negative whose surface nobody predicted

  Counts& operator+=(const Counts& o);
  bool operator==(const Counts&) const = default;
};

/// One sentence. A prediction with a surface is correct when its normalized
/// surface and its id equal those of a not yet matched gold mention;
/// predictions are taken in decode-score order. Surface-less predictions
/// then match remaining gold mentions by id alone.
Counts match_predictions(std::span<const GoldMention> gold, std::span<const PredictedMention> predictions);

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
};

/// Harmonic mean; 0 when p + r == 0.
double f_score(double precision, double recall);
/// Micro scores; every ratio with a zero denominator is 0.
Scores scores(const Counts& c);

struct EvalReport {
  std::string method;
  std::size_t sentences = 0;
  Counts counts;
  Scores scores;
};

/// Sums per-sentence counts, then scores the totals.
EvalReport aggregate(std::string method, std::span<const Counts> per_sentence);

/// Published comparison figures, rendered next to measured rows.
struct ReferenceRow {
  std::string method;
  Scores scores;
  /// Whether the stated F equals the harmonic mean of the stated P and R to
  /// the three reported decimals.
  bool consistent;
};

std::vector<ReferenceRow> reference_rows();

struct TableRow {
  std::string method;
  Scores scores;
};

/// Fixed-width table: Method, Precision, Recall, F-Score (three decimals).
std::string render_table(std::span<const TableRow> rows);
std::string report_json(const EvalReport& report);

/// Scores a prediction file (link output, one JSON object per sentence)
/// against a gold corpus file, pairing lines in order. Throws ParseError on
/// malformed input or differing sentence counts, ArtifactError on a missing file.
EvalReport evaluate_files(const std::filesystem::path& gold, const std::filesystem::path& predictions,
                          std::string method = "system");

}  // namespace kglink::eval
