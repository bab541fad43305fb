#include "kglink/cli/app.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <tuple>

#include <CLI11.hpp>
#include <json.hpp>

#include "kglink/cli/config.hpp"
#include "kglink/data/corpus.hpp"
#include "kglink/data/examples.hpp"
#include "kglink/data/trex.hpp"
#include "kglink/errors.hpp"
#include "kglink/eval/metrics.hpp"
#include "kglink/io.hpp"
#include "kglink/kg/dump.hpp"
#include "kglink/kg/wikidata.hpp"
#include "kglink/model/checkpoint.hpp"
#include "kglink/pipeline/linker.hpp"
#include "kglink/pipeline/training.hpp"

namespace kglink::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Options shared by every subcommand: a config file plus key=value overrides.
struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  // Dedicated flags, applied after the file and before --set.
  std::vector<std::pair<std::string, std::string>> flags;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "JSON run configuration");
  sub->add_option("--set", c.overrides, "Override one configuration key (key=value)");
}

// Registers a flag that overrides configuration key `key`.
void add_key_flag(CLI::App* sub, Common& c, const std::string& flag, const std::string& key, const std::string& help) {
  sub->add_option_function<std::string>(
      flag, [&c, key](const std::string& v) { c.flags.emplace_back(key, v); }, help);
}

RunConfig resolve(const Common& c, std::ostream& err) {
  RunConfig cfg;
  if (!c.config_path.empty()) cfg.merge_file(c.config_path);
  for (const auto& [k, v] : c.flags) cfg.set(k, v);
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  err << "effective config: " << cfg.to_json() << '\n';
  return cfg;
}

json example_json(const data::TokenExample& ex) { return json{{"source", ex.source}, {"target", ex.target}}; }

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  io::write_stream_atomic(path, [&](std::ostream& out) {
    for (const auto& l : lines) out << l << '\n';
  });
}

std::vector<data::TokenExample> read_examples(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError("cannot open training data " + path.string());
  std::vector<data::TokenExample> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      out.push_back({j.at("source").get<std::vector<std::string>>(), j.at("target").get<std::vector<std::string>>()});
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad example: ") + e.what(), n);
    }
  }
  return out;
}

std::string one_line(std::string text) {
  for (char& ch : text)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return text;
}

int cmd_build_index(const RunConfig&, const std::string& dump, const std::string& out_path, std::ostream& out) {
  auto result = kg::ingest_dump(fs::path(dump));
  result.index.save(out_path);
  std::size_t aliases = 0;
  for (const auto& e : result.index.entities()) aliases += e.aliases.size();
  const auto& s = result.stats;
  out << "entities " << result.index.entity_count() << '\n'
      << "aliases " << aliases << '\n'
      << "names " << result.index.string_count() << '\n'
      << "lines " << s.lines << '\n'
      << "skipped_no_label " << s.skipped_no_label << '\n'
      << "duplicate_ids " << s.duplicate_ids << '\n';
  return kSuccess;
}

int cmd_prepare(const RunConfig& cfg, const std::string& corpus, const std::string& dir, std::ostream& out) {
  if (cfg.index.empty()) throw ConfigError("prepare needs an index path (--index or config key 'index')");
  if (!fs::exists(cfg.index)) throw ArtifactError("index not found: " + cfg.index);
  const auto index = kg::KGIndex::load(cfg.index);
  data::CorpusStats corpus_stats;
  auto sentences = data::parse_corpus(fs::path(corpus), data::CorpusOptions{cfg.max_tokens}, &corpus_stats);
  const auto whole = data::profile(sentences, &index);
  std::set<std::string> entities;
  for (const auto& s : sentences)
    for (const auto& l : s.links) entities.insert(l.qid);

  auto [train, test] = data::split_corpus(std::move(sentences), cfg.split_ratio, cfg.seed);
  const fs::path root(dir);
  auto records = [](const std::vector<data::AnnotatedSentence>& part) {
    std::vector<std::string> lines;
    for (const auto& s : part) lines.push_back(data::format_record(s));
    return lines;
  };
  write_lines(root / "train.jsonl", records(train));
  write_lines(root / "test.jsonl", records(test));
  std::vector<std::string> texts;
  for (const auto& s : test) texts.push_back(one_line(s.text));
  write_lines(root / "test.txt", texts);

  for (const auto& [name, part] : {std::pair{"train", &train}, std::pair{"test", &test}}) {
    std::vector<std::string> ext, base;
    for (const auto& s : *part) {
      ext.push_back(example_json(data::extractor_example(s)).dump());
      base.push_back(example_json(data::baseline_example(s, index)).dump());
    }
    write_lines(root / (std::string("extractor_") + name + ".jsonl"), ext);
    write_lines(root / (std::string("baseline_") + name + ".jsonl"), base);
  }

  nlohmann::ordered_json dstats = nlohmann::ordered_json::object();
  for (const auto& [name, part, inject] : {std::tuple{"train", &train, true}, std::tuple{"test", &test, false}}) {
    data::DisambiguatorOptions opts;
    opts.max_source_len = cfg.disambiguator_max_source;
    opts.inject_gold = inject;
    opts.search = cfg.pipeline().search();
    data::DisambiguatorStats st;
    std::vector<std::string> lines;
    for (const auto& ex : data::disambiguator_examples(*part, index, opts, &st)) {
      auto j = example_json(ex.tokens);
      j["surface"] = ex.surface;
      j["gold"] = ex.gold_id;
      j["candidates"] = ex.candidate_ids;
      lines.push_back(j.dump());
    }
    write_lines(root / (std::string("disambiguator_") + name + ".jsonl"), lines);
    dstats[name] = {{"links", st.links},
                    {"examples", st.examples},
                    {"gold_not_in_kg", st.gold_not_in_kg},
                    {"gold_injected", st.gold_injected},
                    {"gold_relocated", st.gold_relocated},
                    {"no_candidates", st.no_candidates}};
  }

  nlohmann::ordered_json stats;
  stats["sentences"] = whole.sentences;
  stats["train_sentences"] = train.size();
  stats["test_sentences"] = test.size();
  stats["mentions"] = whole.links;
  stats["unique_entities"] = entities.size();
  stats["mentions_in_kg"] = whole.links_in_kg;
  stats["exact_label_matches"] = whole.exact_label_match;
  stats["exact_match_ratio"] = whole.links ? static_cast<double>(whole.exact_label_match) / whole.links : 0.0;
  stats["mean_tokens"] = whole.mean_tokens;
  stats["corpus"] = {{"lines", corpus_stats.lines},
                     {"truncated_sentences", corpus_stats.truncated_sentences},
                     {"annotations", corpus_stats.annotations},
                     {"kept", corpus_stats.kept},
                     {"dropped_misaligned", corpus_stats.dropped_misaligned},
                     {"dropped_truncated", corpus_stats.dropped_truncated}};
  stats["disambiguator"] = dstats;
  const std::string text = stats.dump(2) + '\n';
  io::write_file_atomic(root / "stats.json", text);
  out << text;
  return kSuccess;
}

int cmd_train(const RunConfig& cfg, const std::string& task, const std::string& data_dir, const std::string& out_path,
              std::string trace_path, std::ostream& out, std::ostream& err) {
  const auto training = cfg.training(task);
  const fs::path data(data_dir);
  const auto examples = read_examples(fs::is_directory(data) ? data / (task + "_train.jsonl") : data);
  std::vector<double> trace;
  auto model = pipeline::train_task_model(task, examples, training, &trace, [&](std::size_t epoch, double loss) {
    err << "epoch " << epoch + 1 << '/' << training.train.epochs << " loss " << loss << '\n';
    return true;
  });
  model::save_checkpoint(model, out_path);
  if (trace_path.empty()) trace_path = out_path + ".loss.tsv";
  io::write_stream_atomic(trace_path, [&](std::ostream& o) {
    o << "epoch\tloss\n";
    char buf[64];
    for (std::size_t e = 0; e < trace.size(); ++e) {
      std::snprintf(buf, sizeof(buf), "%zu\t%.17g\n", e + 1, trace[e]);
      o << buf;
    }
  });
  out << "task " << task << '\n'
      << "examples " << examples.size() << '\n'
      << "vocabulary " << model.source_vocab.size() << '\n'
      << "final_loss " << (trace.empty() ? 0.0 : trace.back()) << '\n'
      << "checkpoint " << out_path << '\n';
  return kSuccess;
}

int cmd_link(const RunConfig& cfg, std::istream& in, std::ostream& out) {
  const auto mode = cfg.link_mode();
  auto require = [](const std::string& path, const char* key) {
    if (path.empty()) throw ConfigError(std::string("link needs a '") + key + "' path");
    return fs::path(path);
  };
  pipeline::Linker::Paths paths;
  paths.index = require(cfg.index, "index");
  if (mode == pipeline::LinkMode::baseline) {
    paths.extractor = require(cfg.baseline, "baseline");
  } else {
    paths.extractor = require(cfg.extractor, "extractor");
    if (mode == pipeline::LinkMode::pipeline) paths.disambiguator = require(cfg.disambiguator, "disambiguator");
  }
  const auto linker = pipeline::Linker::load(paths, mode, cfg.pipeline());
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out << pipeline::predictions_json(line, linker.link(line)) << '\n';
  }
  return kSuccess;
}

int cmd_evaluate(const std::string& gold, const std::string& pred, const std::string& method,
                 const std::string& report_path, std::ostream& out) {
  const auto report = eval::evaluate_files(gold, pred, method);
  std::vector<eval::TableRow> rows = {{report.method, report.scores}};
  const auto refs = eval::reference_rows();
  for (const auto& r : refs) rows.push_back({r.method, r.scores});
  out << eval::render_table(rows);
  for (const auto& r : refs) {
    if (r.consistent) continue;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "note: %s F-Score %.3f is not the harmonic mean of its P and R (%.3f)\n",
                  r.method.c_str(), r.scores.f_score, eval::f_score(r.scores.precision, r.scores.recall));
    out << buf;
  }
  const auto& c = report.counts;
  out << "sentences " << report.sentences << "  tp " << c.true_positives << "  fp " << c.false_positives << "  fn "
      << c.false_negatives << '\n'
      << "errors: wrong_entity " << c.wrong_entity << "  spurious_mention " << c.spurious_mention
      << "  missed_mention " << c.missed_mention << '\n';
  if (!report_path.empty()) io::write_file_atomic(report_path, eval::report_json(report) + '\n');
  return kSuccess;
}

template <class Fn>
int convert(const std::string& in_path, const std::string& out_path, Fn&& fn) {
  std::ifstream in(in_path, std::ios::binary);
  if (!in) throw ArtifactError("cannot open " + in_path);
  io::write_stream_atomic(out_path, [&](std::ostream& o) { fn(in, o); });
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entity linking over a local knowledge graph", args.empty() ? "kglink" : args[0]};
  app.require_subcommand(1);
  Common common;

  std::string dump, index_out;
  auto* build = app.add_subcommand("build-index", "Build a search index from an entity dump");
  add_common(build, common);
  build->add_option("--dump", dump, "Entity dump (id<TAB>label<TAB>aliases)")->required();
  build->add_option("--out", index_out, "Index file to write")->required();

  std::string corpus, prep_dir;
  auto* prepare = app.add_subcommand("prepare", "Split a corpus and write task examples");
  add_common(prepare, common);
  prepare->add_option("--corpus", corpus, "Annotated corpus (JSON lines)")->required();
  prepare->add_option("--out", prep_dir, "Output directory")->required();
  add_key_flag(prepare, common, "--index", "index", "Index file");
  add_key_flag(prepare, common, "--seed", "seed", "Split seed");

  std::string task, train_data, ckpt, trace;
  auto* train = app.add_subcommand("train", "Train one task model");
  add_common(train, common);
  train->add_option("--task", task, "extractor, disambiguator or baseline")
      ->required()
      ->check(CLI::IsMember({"extractor", "disambiguator", "baseline"}));
  train->add_option("--data", train_data, "Directory written by prepare, or an example file")->required();
  train->add_option("--out", ckpt, "Checkpoint to write")->required();
  train->add_option("--trace", trace, "Loss trace file (default: <out>.loss.tsv)");
  add_key_flag(train, common, "--seed", "seed", "Initialization and shuffling seed");
  add_key_flag(train, common, "--epochs", "epochs", "Training epochs");

  auto* link = app.add_subcommand("link", "Link each line of standard input");
  add_common(link, common);
  add_key_flag(link, common, "--index", "index", "Index file");
  add_key_flag(link, common, "--extractor", "extractor", "Extractor checkpoint");
  add_key_flag(link, common, "--disambiguator", "disambiguator", "Disambiguator checkpoint");
  add_key_flag(link, common, "--baseline", "baseline", "Baseline checkpoint");
  add_key_flag(link, common, "--mode", "mode", "pipeline, top1 or baseline");

  std::string gold, pred, method = "system", report_path;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against a gold corpus");
  add_common(evaluate, common);
  evaluate->add_option("--gold", gold, "Gold corpus (JSON lines)")->required();
  evaluate->add_option("--pred", pred, "Predictions written by link")->required();
  evaluate->add_option("--method", method, "Row label for the measured system");
  evaluate->add_option("--out", report_path, "JSON report to write");

  std::string conv_in, conv_out, language = "en";
  auto* wikidata = app.add_subcommand("convert-wikidata", "Convert a Wikidata JSON dump to an entity dump");
  add_common(wikidata, common);
  wikidata->add_option("--in", conv_in, "Wikidata JSON dump")->required();
  wikidata->add_option("--out", conv_out, "Entity dump to write")->required();
  wikidata->add_option("--language", language, "Label language");

  auto* trex = app.add_subcommand("convert-trex", "Convert T-REx documents to an annotated corpus");
  add_common(trex, common);
  trex->add_option("--in", conv_in, "T-REx JSON")->required();
  trex->add_option("--out", conv_out, "Corpus to write")->required();

  std::vector<std::string> rest(args.rbegin(), args.rend());
  if (!rest.empty()) rest.pop_back();
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      out << app.help(app.get_name(), CLI::AppFormatMode::All);
      return kSuccess;
    }
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    const RunConfig cfg = resolve(common, err);
    if (build->parsed()) return cmd_build_index(cfg, dump, index_out, out);
    if (prepare->parsed()) return cmd_prepare(cfg, corpus, prep_dir, out);
    if (train->parsed()) return cmd_train(cfg, task, train_data, ckpt, trace, out, err);
    if (link->parsed()) return cmd_link(cfg, in, out);
    if (evaluate->parsed()) return cmd_evaluate(gold, pred, method, report_path, out);
    if (wikidata->parsed()) {
      return convert(conv_in, conv_out, [&](std::istream& i, std::ostream& o) {
        const auto s = kg::convert_wikidata(i, o, language);
        out << "lines " << s.lines << "\nwritten " << s.written << "\nskipped_no_label " << s.skipped_no_label
            << "\nskipped_not_item " << s.skipped_not_item << '\n';
      });
    }
    if (trex->parsed()) {
      return convert(conv_in, conv_out, [&](std::istream& i, std::ostream& o) {
        const auto s = data::convert_trex(i, o);
        out << "documents " << s.documents << "\nsentences " << s.sentences << "\nannotations " << s.annotations
            << "\nskipped_non_entity " << s.skipped_non_entity << "\nskipped_cross_sentence "
            << s.skipped_cross_sentence << "\nduplicates " << s.duplicates << '\n';
      });
    }
  } catch (const ParseError& e) {
    err << "format error: " << e.what() << '\n';
    return kFormatError;
  } catch (const ArtifactError& e) {
    err << "missing artifact: " << e.what() << '\n';
    return kMissingArtifact;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "format error: " << e.what() << '\n';
    return kFormatError;
  }
  return kConfigError;
}

}  // namespace kglink::cli
