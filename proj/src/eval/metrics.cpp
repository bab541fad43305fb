#include "kglink/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include <json.hpp>

#include "kglink/data/corpus.hpp"
#include "kglink/errors.hpp"
#include "kglink/kg/normalize.hpp"

namespace kglink::eval {

Counts& Counts::operator+=(const Counts& o) {
  true_positives += o.true_positives;
  false_positives += o.false_positives;
  false_negatives += o.false_negatives;
  wrong_entity += o.wrong_entity;
  spurious_mention += o.spurious_mention;
  missed_mention += o.missed_mention;
  return *this;
}

Counts match_predictions(std::span<const GoldMention> gold, std::span<const PredictedMention> predictions) {
  std::vector<std::string> gold_surface(gold.size());
  std::set<std::string> gold_surfaces, predicted_surfaces;
  for (std::size_t g = 0; g < gold.size(); ++g) gold_surfaces.insert(gold_surface[g] = kg::normalize(gold[g].surface));

  std::vector<std::size_t> order(predictions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return predictions[a].decode_score > predictions[b].decode_score;
  });

  std::vector<bool> gold_used(gold.size(), false), pred_matched(predictions.size(), false);
  std::vector<std::string> pred_surface(predictions.size());
  auto claim = [&](std::size_t p, bool by_surface, bool unpredicted_only) {
    for (std::size_t g = 0; g < gold.size(); ++g) {
      if (gold_used[g] || gold[g].qid != predictions[p].qid) continue;
      if (by_surface && gold_surface[g] != pred_surface[p]) continue;
      if (unpredicted_only && predicted_surfaces.count(gold_surface[g])) continue;
      gold_used[g] = pred_matched[p] = true;
      return true;
    }
    return false;
  };
  for (std::size_t p : order) {
    if (predictions[p].surface.empty()) continue;
    pred_surface[p] = kg::normalize(predictions[p].surface);
    predicted_surfaces.insert(pred_surface[p]);
  }
  for (std::size_t p : order)
    if (!predictions[p].surface.empty()) claim(p, true, false);
  // Id-only matches take gold mentions nobody found by surface first, so the
  // leftover misses do not depend on input order.
  for (std::size_t p : order)
    if (predictions[p].surface.empty() && !claim(p, false, true)) claim(p, false, false);

  Counts c;
  for (std::size_t p = 0; p < predictions.size(); ++p) {
    if (pred_matched[p]) {
      ++c.true_positives;
      continue;
    }
    ++c.false_positives;
    if (!predictions[p].surface.empty() && gold_surfaces.count(pred_surface[p])) {
      ++c.wrong_entity;
    } else {
      ++c.spurious_mention;
    }
  }
  for (std::size_t g = 0; g < gold.size(); ++g) {
    if (gold_used[g]) continue;
    ++c.false_negatives;
    if (!predicted_surfaces.count(gold_surface[g])) ++c.missed_mention;
  }
  return c;
}

double f_score(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

Scores scores(const Counts& c) {
  auto ratio = [](std::size_t num, std::size_t den) {
    return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
  };
  Scores s;
  s.precision = ratio(c.true_positives, c.true_positives + c.false_positives);
  s.recall = ratio(c.true_positives, c.true_positives + c.false_negatives);
  s.f_score = f_score(s.precision, s.recall);
  return s;
}

EvalReport aggregate(std::string method, std::span<const Counts> per_sentence) {
  EvalReport r;
  r.method = std::move(method);
  r.sentences = per_sentence.size();
  for (const auto& c : per_sentence) r.counts += c;
  r.scores = scores(r.counts);
  return r;
}

std::vector<ReferenceRow> reference_rows() {
  const std::pair<const char*, Scores> rows[] = {
      {"pipeline (published)", {0.714, 0.712, 0.713}},
      {"baseline (published)", {0.664, 0.662, 0.663}},
      {"OpenTapioca (published)", {0.407, 0.829, 0.579}},
  };
  std::vector<ReferenceRow> out;
  for (const auto& [method, s] : rows) {
    const double hm = f_score(s.precision, s.recall);
    out.push_back({method, s, std::abs(std::round(hm * 1000.0) / 1000.0 - s.f_score) < 1e-9});
  }
  return out;
}

std::string render_table(std::span<const TableRow> rows) {
  std::size_t width = std::string("Method").size();
  for (const auto& r : rows) width = std::max(width, r.method.size());
  auto line = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d) {
    std::string s = a + std::string(width - a.size() + 2, ' ');
    for (const auto* col : {&b, &c, &d}) s += std::string(col == &d ? 9 - std::min<std::size_t>(9, col->size()) : 11 - std::min<std::size_t>(11, col->size()), ' ') + *col;
    return s + '\n';
  };
  auto fixed3 = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return std::string(buf);
  };
  std::string out = line("Method", "Precision", "Recall", "F-Score");
  out += std::string(width + 2 + 11 + 11 + 9, '-') + '\n';
  for (const auto& r : rows)
    out += line(r.method, fixed3(r.scores.precision), fixed3(r.scores.recall), fixed3(r.scores.f_score));
  return out;
}

std::string report_json(const EvalReport& report) {
  const auto& c = report.counts;
  nlohmann::json j = {
      {"method", report.method},
      {"sentences", report.sentences},
      {"true_positives", c.true_positives},
      {"false_positives", c.false_positives},
      {"false_negatives", c.false_negatives},
      {"precision", report.scores.precision},
      {"recall", report.scores.recall},
      {"f_score", report.scores.f_score},
      {"errors", {{"wrong_entity", c.wrong_entity}, {"spurious_mention", c.spurious_mention}, {"missed_mention", c.missed_mention}}},
  };
  return j.dump(2);
}

namespace {

std::vector<PredictedMention> parse_prediction_line(const std::string& line, std::size_t line_number) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line_number);
  }
  if (!j.is_object() || !j.contains("predictions") || !j["predictions"].is_array())
    throw ParseError("prediction record lacks a 'predictions' array", line_number);
  std::vector<PredictedMention> out;
  for (const auto& p : j["predictions"]) {
    if (!p.is_object() || !p.contains("qid") || !p["qid"].is_string())
      throw ParseError("prediction lacks a string 'qid'", line_number);
    out.push_back({p.value("surface", ""), p["qid"].get<std::string>(), p.value("decode_score", 0.0)});
  }
  return out;
}

}  // namespace

EvalReport evaluate_files(const std::filesystem::path& gold, const std::filesystem::path& predictions,
                          std::string method) {
  const auto sentences = data::parse_corpus(gold, data::CorpusOptions{std::numeric_limits<std::size_t>::max()});
  std::ifstream in(predictions, std::ios::binary);
  if (!in) throw ArtifactError("cannot open predictions " + predictions.string());

  std::vector<Counts> per_sentence;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto preds = parse_prediction_line(line, line_number);
    if (per_sentence.size() >= sentences.size())
      throw ParseError("more prediction records than gold sentences (" + std::to_string(sentences.size()) + ")",
                       line_number);
    std::vector<GoldMention> golds;
    for (const auto& l : sentences[per_sentence.size()].links) golds.push_back({l.surface, l.qid});
    per_sentence.push_back(match_predictions(golds, preds));
  }
  if (per_sentence.size() != sentences.size())
    throw ParseError("prediction file has " + std::to_string(per_sentence.size()) + " records but gold has " +
                     std::to_string(sentences.size()) + " sentences");
  return aggregate(std::move(method), per_sentence);
}

}  // namespace kglink::eval
