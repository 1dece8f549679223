#include "persuasion/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "persuasion/baseline.hpp"
#include "persuasion/config.hpp"
#include "persuasion/corpus.hpp"
#include "persuasion/error.hpp"
#include "persuasion/evaluate.hpp"
#include "persuasion/probability_table.hpp"
#include "persuasion/report.hpp"

namespace persuasion::cli {

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

class Log {
 public:
  Log(std::ostream& err, const bool& quiet) : err_(err), quiet_(quiet) {}
  void info(const std::string& msg) const {
    if (!quiet_) err_ << "persuade: " << msg << '\n';
  }
  void warn(const std::string& msg) const {
    if (!quiet_) err_ << "persuade: warning: " << msg << '\n';
  }

 private:
  std::ostream& err_;
  const bool& quiet_;
};

RunConfig require_config(const GlobalOptions& g) {
  if (g.config_path.empty()) throw ConfigError("--config is required for this command");
  auto config = load_run_config(g.config_path);
  if (g.seed) config.trainer.seed = *g.seed;
  return config;
}

// Writes to `path`, or to `out` when the path is empty or "-".
template <class Fn>
void write_to(const std::string& path, std::ostream& out, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(out);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot write " + path);
  fn(file);
  file.flush();
  if (!file) throw DataError("failed writing " + path);
}

std::set<std::string> split_languages(const std::string& list) {
  std::set<std::string> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    auto end = list.find(',', start);
    if (end == std::string::npos) end = list.size();
    if (end > start) out.insert(list.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

double round_threshold(double x) { return std::round(x * 1e10) / 1e10; }

// --- eda -------------------------------------------------------------------

struct EdaOptions {
  std::string out;
};

void cmd_eda(const GlobalOptions& g, const EdaOptions& o, std::ostream& out, const Log& log) {
  const auto config = require_config(g);
  const auto corpus = load_config_corpus(config);
  const auto matrix = label_distribution(corpus);
  write_to(o.out, out, [&](std::ostream& s) { write_distribution_csv(s, matrix); });
  log.info("label distribution over " + std::to_string(matrix.languages.size()) + " languages, " +
           std::to_string(matrix.total()) + " gold labels");
}

// --- train -----------------------------------------------------------------

struct TrainOptions {
  std::string out;
  std::optional<std::string> preprocess;
};

void cmd_train(const GlobalOptions& g, const TrainOptions& o, const Log& log) {
  auto config = require_config(g);
  if (o.preprocess) config.preprocess = parse_preprocess_flags(*o.preprocess);
  const auto corpus = load_config_corpus(config);
  log.info("training on " + std::to_string(corpus.size()) + " paragraphs, preprocess=" +
           to_flags(config.preprocess));
  const auto epochs = config.trainer.epochs;
  const auto model = train(corpus, config.featurizer, config.preprocess, config.trainer,
                           [&](std::size_t epoch, double loss) {
                             log.info("epoch " + std::to_string(epoch) + "/" + std::to_string(epochs) +
                                      " loss " + format_number(loss));
                           });
  save_model(model, o.out);
  log.info("model written to " + o.out);
}

// --- predict ---------------------------------------------------------------

struct PredictOptions {
  std::string model;
  std::string template_path;
  std::string language;
  std::string out;
};

void cmd_predict(const GlobalOptions& g, const PredictOptions& o, std::ostream& out, const Log& log) {
  const auto model = load_model(o.model);
  auto vocabulary = model.vocabulary;
  if (!g.config_path.empty()) vocabulary = load_vocabulary(require_config(g).vocabulary_path);
  const auto corpus = load_corpus(o.template_path, o.language, vocabulary);
  const auto table = predict_probs(model, corpus);
  write_to(o.out, out, [&](std::ostream& s) { write_probability_table(s, table); });
  log.info("predicted " + std::to_string(table.size()) + " paragraphs");
}

// --- calibrate -------------------------------------------------------------

struct CalibrateOptions {
  std::vector<std::string> tables;
  std::string mode = "default";
  std::string holdout;
  std::string out;
  std::string summary;
  std::string per_language;
  std::string save_table;
};

void cmd_calibrate(const GlobalOptions& g, const CalibrateOptions& o, std::ostream& out, const Log& log) {
  const auto config = require_config(g);
  const auto corpus = load_config_corpus(config);
  const auto& vocabulary = corpus.vocabulary();

  CalibrationCurve curve;
  std::vector<NamedTable> named;
  if (o.mode == "default") {
    if (o.tables.empty()) throw ConfigError("default calibration needs at least one --table");
    std::vector<ProbabilityTable> tables;
    for (const auto& path : o.tables) {
      tables.push_back(load_probability_table(path, vocabulary));
      named.push_back({fs::path(path).stem().string(), tables.back()});
    }
    curve = calibrate_ensemble(tables, *corpus.gold(), config.grid);
  } else if (o.mode == "zero-shot") {
    auto holdout = split_languages(o.holdout);
    if (holdout.empty()) holdout.insert(config.holdout.begin(), config.holdout.end());
    if (holdout.empty()) throw ConfigError("zero-shot calibration needs holdout languages");
    std::string names;
    for (const auto& h : holdout) names += (names.empty() ? "" : ",") + h;
    log.info("zero-shot: holding out " + names);
    auto result = run_zero_shot(corpus, holdout, config.training_options(), config.grid,
                                [&](std::size_t epoch, double loss) {
                                  log.info("epoch " + std::to_string(epoch) + " loss " + format_number(loss));
                                });
    if (!o.save_table.empty()) save_probability_table(result.table, o.save_table);
    named.push_back({"zero-shot", std::move(result.table)});
    curve = std::move(result.curve);
  } else {
    throw ConfigError("unknown calibration mode '" + o.mode + "' (expected default or zero-shot)");
  }

  write_to(o.out, out, [&](std::ostream& s) { write_curve_csv(s, curve); });
  if (!o.per_language.empty()) {
    const auto rows = per_language_curves(named, *corpus.gold(), config.grid);
    write_to(o.per_language, out, [&](std::ostream& s) { write_language_curves_csv(s, rows); });
  }

  double adjusted = round_threshold(curve.best_threshold + config.threshold_adjust);
  const bool clamped = adjusted < 0.0 || adjusted > 1.0;
  if (clamped) {
    adjusted = std::clamp(adjusted, 0.0, 1.0);
    log.warn("adjusted threshold clamped to " + format_number(adjusted));
  }
  nlohmann::ordered_json summary;
  summary["mode"] = o.mode;
  summary["best_threshold"] = curve.best_threshold;
  summary["best_f1_micro"] = curve.best_f1_micro;
  summary["threshold_adjust"] = config.threshold_adjust;
  summary["adjusted_threshold"] = adjusted;
  summary["clamped"] = clamped;
  write_to(o.summary, out, [&](std::ostream& s) { s << summary.dump(2) << '\n'; });
  log.info("best threshold " + format_number(curve.best_threshold) + " (micro F1 " +
           format_number(curve.best_f1_micro) + ")");
}

// --- submit ----------------------------------------------------------------

struct SubmitOptions {
  std::vector<std::string> tables;
  std::string out_dir;
};

void cmd_submit(const GlobalOptions& g, const SubmitOptions& o, const Log& log) {
  const auto config = require_config(g);
  const auto vocabulary = load_vocabulary(config.vocabulary_path);
  const auto seen = config.seen_languages();

  std::vector<ProbabilityTable> tables;
  std::set<std::string> languages;
  for (const auto& path : o.tables) {
    tables.push_back(load_probability_table(path, vocabulary));
    for (const auto& row : tables.back().rows()) {
      if (!is_valid_language_code(row.language)) {
        throw ConfigError(path + ": unknown language tag '" + row.language + "' on " + to_string(row.key));
      }
      languages.insert(row.language);
    }
  }

  fs::create_directories(o.out_dir);
  for (const auto& lang : languages) {
    const bool is_seen = seen.contains(lang);
    const double theta = is_seen ? config.seen_threshold : config.unseen_threshold;
    LabelMap merged;
    std::size_t members = 0;
    for (const auto& t : tables) {
      const auto part = t.restrict_to_language(lang);
      if (part.empty()) continue;
      merged = ensemble_union(merged, apply_threshold(part, theta), vocabulary);
      ++members;
    }
    const auto path = fs::path(o.out_dir) / ("submission_" + lang + ".txt");
    emit_submission(merged, vocabulary, path);
    log.info(lang + (is_seen ? " (seen" : " (unseen") + ", threshold " + format_number(theta) + ", " +
             std::to_string(members) + " table(s)) -> " + path.string());
  }
}

// --- score -----------------------------------------------------------------

struct ScoreOptions {
  std::string pred;
  std::string gold;
  std::string vocabulary;
  std::vector<std::string> templates;
  std::string out;
};

void cmd_score(const GlobalOptions& g, const ScoreOptions& o, std::ostream& out, const Log& log) {
  TechniqueVocabulary vocabulary;
  if (!o.vocabulary.empty()) {
    vocabulary = load_vocabulary(o.vocabulary);
  } else if (!g.config_path.empty()) {
    vocabulary = load_vocabulary(require_config(g).vocabulary_path);
  } else {
    throw ConfigError("score needs --vocabulary or --config");
  }
  const auto gold = read_label_file(o.gold, vocabulary);
  const auto pred = read_label_file(o.pred, vocabulary);

  LanguageMap languages;
  for (const auto& spec : o.templates) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--template expects LANG=PATH, got '" + spec + "'");
    const auto corpus = load_corpus(spec.substr(eq + 1), spec.substr(0, eq), vocabulary);
    const auto m = corpus.language_map();
    languages.insert(m.begin(), m.end());
  }
  const auto report = score(pred, gold, vocabulary, languages);
  write_to(o.out, out, [&](std::ostream& s) { s << score_report_json(report, vocabulary); });
  log.info("micro F1 " + format_number(report.f1_micro()) + ", macro F1 " + format_number(report.f1_macro()));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Persuasion-technique detection: train, calibrate, score and submit"};
  app.name("persuade");
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "Run configuration (JSON)");
  app.add_option("--seed", g.seed, "Override the configured seed");
  app.add_flag("--quiet", g.quiet, "Suppress diagnostics on stderr");

  EdaOptions eda;
  auto* eda_cmd = app.add_subcommand("eda", "Write the language x technique label distribution CSV");
  eda_cmd->add_option("--out", eda.out, "Output CSV (default stdout)");

  TrainOptions tr;
  auto* train_cmd = app.add_subcommand("train", "Train the baseline classifier");
  train_cmd->add_option("--out", tr.out, "Model file to write")->required();
  train_cmd->add_option("--preprocess", tr.preprocess, "Strategies: ws_punct,entities or none");

  PredictOptions pr;
  auto* predict_cmd = app.add_subcommand("predict", "Write per-paragraph class probabilities (JSON Lines)");
  predict_cmd->add_option("--model", pr.model, "Model file")->required();
  predict_cmd->add_option("--template", pr.template_path, "Paragraph template file")->required();
  predict_cmd->add_option("--language", pr.language, "Language code of the template")->required();
  predict_cmd->add_option("--out", pr.out, "Output table (default stdout)");

  CalibrateOptions ca;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Sweep the confidence threshold");
  calibrate_cmd->add_option("--table", ca.tables, "Probability table(s); several tables are merged by label union");
  calibrate_cmd->add_option("--mode", ca.mode, "default or zero-shot")->check(CLI::IsMember({"default", "zero-shot"}));
  calibrate_cmd->add_option("--holdout", ca.holdout, "Comma-separated holdout languages (zero-shot)");
  calibrate_cmd->add_option("--out", ca.out, "Curve CSV (default stdout)");
  calibrate_cmd->add_option("--summary", ca.summary, "Summary JSON (default stdout)");
  calibrate_cmd->add_option("--per-language", ca.per_language, "Per-language curves CSV");
  calibrate_cmd->add_option("--save-table", ca.save_table, "Zero-shot: write the holdout probability table");

  SubmitOptions su;
  auto* submit_cmd = app.add_subcommand("submit", "Decode tables with the seen/unseen thresholds");
  submit_cmd->add_option("--table", su.tables, "Probability table(s)")->required();
  submit_cmd->add_option("--out-dir", su.out_dir, "Directory for submission_<lang>.txt files")->required();

  ScoreOptions sc;
  auto* score_cmd = app.add_subcommand("score", "Score a prediction file against gold labels");
  score_cmd->add_option("--pred", sc.pred, "Prediction file")->required();
  score_cmd->add_option("--gold", sc.gold, "Gold label file")->required();
  score_cmd->add_option("--vocabulary", sc.vocabulary, "Technique vocabulary file");
  score_cmd->add_option("--template", sc.templates, "LANG=PATH template for per-language figures");
  score_cmd->add_option("--out", sc.out, "Report JSON (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  const Log log(err, g.quiet);
  try {
    if (*eda_cmd) cmd_eda(g, eda, out, log);
    if (*train_cmd) cmd_train(g, tr, log);
    if (*predict_cmd) cmd_predict(g, pr, out, log);
    if (*calibrate_cmd) cmd_calibrate(g, ca, out, log);
    if (*submit_cmd) cmd_submit(g, su, log);
    if (*score_cmd) cmd_score(g, sc, out, log);
  } catch (const ConfigError& e) {
    err << "persuade: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DivergenceError& e) {
    err << "persuade: training diverged: " << e.what() << '\n';
    return kDivergence;
  } catch (const VocabularyMismatch& e) {
    err << "persuade: vocabulary mismatch: " << e.what() << '\n';
    return kVocabularyMismatch;
  } catch (const DataError& e) {
    err << "persuade: data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "persuade: data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "persuade: internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kOk;
}

}  // namespace persuasion::cli
