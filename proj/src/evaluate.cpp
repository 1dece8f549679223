#include "persuasion/evaluate.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "persuasion/error.hpp"

namespace persuasion {

namespace {

std::vector<std::size_t> label_indices(const LabelSet& labels, const TechniqueVocabulary& vocabulary) {
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (const auto& name : labels) out.push_back(vocabulary.index_of(name));
  return out;
}

void add_key(std::vector<Tally>& per_class, const std::vector<std::size_t>& pred,
             const std::vector<std::size_t>& gold) {
  std::vector<std::uint8_t> in_gold(per_class.size(), 0);
  for (auto c : gold) in_gold[c] = 1;
  std::vector<std::uint8_t> in_pred(per_class.size(), 0);
  for (auto c : pred) {
    in_pred[c] = 1;
    if (in_gold[c]) {
      ++per_class[c].tp;
    } else {
      ++per_class[c].fp;
    }
  }
  for (auto c : gold) {
    if (!in_pred[c]) ++per_class[c].fn;
  }
}

ScoreSummary summarize(std::vector<Tally> per_class) {
  ScoreSummary s;
  double macro_sum = 0.0;
  std::size_t active = 0;
  for (const auto& t : per_class) {
    s.total += t;
    if (t.active()) {
      macro_sum += t.f1();
      ++active;
    }
  }
  s.per_class = std::move(per_class);
  s.f1_micro = s.total.f1();
  s.f1_macro = active ? macro_sum / static_cast<double>(active) : 0.0;
  return s;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

nlohmann::ordered_json tally_json(const Tally& t) {
  return {{"tp", t.tp}, {"fp", t.fp}, {"fn", t.fn}, {"precision", t.precision()},
          {"recall", t.recall()}, {"f1", t.f1()}};
}

nlohmann::ordered_json summary_json(const ScoreSummary& s, const TechniqueVocabulary& vocabulary) {
  nlohmann::ordered_json j;
  j["f1_micro"] = s.f1_micro;
  j["f1_macro"] = s.f1_macro;
  j["tp"] = s.total.tp;
  j["fp"] = s.total.fp;
  j["fn"] = s.total.fn;
  nlohmann::ordered_json classes = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < s.per_class.size(); ++c) {
    classes[vocabulary.name(c)] = tally_json(s.per_class[c]);
  }
  j["per_class"] = std::move(classes);
  return j;
}

}  // namespace

double Tally::f1() const { return ratio(2 * tp, 2 * tp + fp + fn); }
double Tally::precision() const { return ratio(tp, tp + fp); }
double Tally::recall() const { return ratio(tp, tp + fn); }

LabelMap apply_threshold(const ProbabilityTable& table, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw std::invalid_argument("threshold " + format_number(theta) + " is outside [0,1]");
  }
  LabelMap out;
  for (const auto& row : table.rows()) {
    auto& labels = out[row.key];
    for (std::size_t c = 0; c < row.probs.size(); ++c) {
      if (row.probs[c] >= theta) labels.insert(table.vocabulary().name(c));
    }
  }
  return out;
}

ScoreReport score(const LabelMap& pred, const LabelMap& gold, const TechniqueVocabulary& vocabulary,
                  const LanguageMap& languages) {
  std::set<ParagraphKey> keys;
  for (const auto& [k, _] : pred) keys.insert(k);
  for (const auto& [k, _] : gold) keys.insert(k);

  const LabelSet empty;
  auto lookup = [&](const LabelMap& m, const ParagraphKey& k) -> const LabelSet& {
    const auto it = m.find(k);
    return it == m.end() ? empty : it->second;
  };

  std::vector<Tally> global(vocabulary.size());
  std::map<std::string, std::vector<Tally>> by_language;
  for (const auto& key : keys) {
    const auto p = label_indices(lookup(pred, key), vocabulary);
    const auto g = label_indices(lookup(gold, key), vocabulary);
    add_key(global, p, g);
    if (const auto it = languages.find(key); it != languages.end()) {
      auto& tallies = by_language[it->second];
      if (tallies.empty()) tallies.resize(vocabulary.size());
      add_key(tallies, p, g);
    }
  }

  ScoreReport report;
  report.global = summarize(std::move(global));
  for (auto& [lang, tallies] : by_language) report.per_language.emplace(lang, summarize(std::move(tallies)));
  return report;
}

double f1_micro(const LabelMap& pred, const LabelMap& gold, const TechniqueVocabulary& vocabulary) {
  return score(pred, gold, vocabulary).global.f1_micro;
}

double f1_macro(const LabelMap& pred, const LabelMap& gold, const TechniqueVocabulary& vocabulary) {
  return score(pred, gold, vocabulary).global.f1_macro;
}

LabelMap ensemble_union(const LabelMap& a, const LabelMap& b, const TechniqueVocabulary& vocabulary) {
  LabelMap out;
  for (const LabelMap* m : {&a, &b}) {
    for (const auto& [key, labels] : *m) {
      auto& merged = out[key];
      for (const auto& name : labels) {
        if (!vocabulary.contains(name)) {
          throw VocabularyMismatch("technique '" + name + "' is not in the shared vocabulary");
        }
        merged.insert(name);
      }
    }
  }
  return out;
}

void ThresholdGrid::validate() const {
  if (!(start >= 0.0 && start < stop && stop <= 1.0)) {
    throw ConfigError("threshold grid needs 0 <= start < stop <= 1");
  }
  if (!(step > 0.0)) throw ConfigError("threshold grid step must be positive");
}

std::vector<double> ThresholdGrid::points() const {
  validate();
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double theta = std::round((start + static_cast<double>(i) * step) * 1e10) / 1e10;
    out.push_back(std::min(theta, 1.0));
  }
  return out;
}

CalibrationCurve calibrate_ensemble(std::span<const ProbabilityTable> tables, const GoldLabels& gold,
                                    const ThresholdGrid& grid) {
  if (tables.empty()) throw DataError("no probability table to calibrate");
  const auto& vocabulary = tables.front().vocabulary();
  std::size_t rows = 0;
  for (const auto& t : tables) {
    if (!(t.vocabulary() == vocabulary)) {
      throw VocabularyMismatch("probability tables use different vocabularies");
    }
    rows += t.size();
  }
  if (rows == 0) throw DataError("probability table is empty");
  const auto thresholds = grid.points();
  const std::size_t classes = vocabulary.size();

  // Union of thresholded sets at a common theta is the threshold of the
  // per-class maximum; -1 marks "no prediction from any table".
  std::map<ParagraphKey, std::vector<double>> best_prob;
  for (const auto& t : tables) {
    for (const auto& row : t.rows()) {
      const auto it = best_prob.try_emplace(row.key, classes, -1.0).first;
      for (std::size_t c = 0; c < classes; ++c) it->second[c] = std::max(it->second[c], row.probs[c]);
    }
  }
  std::vector<double> probs;
  std::vector<std::uint8_t> truth;
  probs.reserve(best_prob.size() * classes);
  truth.reserve(best_prob.size() * classes);
  for (const auto& [key, p] : best_prob) {
    std::vector<std::uint8_t> g(classes, 0);
    if (const auto it = gold.find(key); it != gold.end()) {
      for (const auto& name : it->second) g[vocabulary.index_of(name)] = 1;
    }
    probs.insert(probs.end(), p.begin(), p.end());
    truth.insert(truth.end(), g.begin(), g.end());
  }

  CalibrationCurve curve;
  curve.points.reserve(thresholds.size());
  curve.best_f1_micro = -1.0;
  std::vector<Tally> per_class(classes);
  for (double theta : thresholds) {
    std::fill(per_class.begin(), per_class.end(), Tally{});
    for (std::size_t i = 0; i < probs.size(); ++i) {
      auto& t = per_class[i % classes];
      const bool predicted = probs[i] >= theta;
      if (predicted && truth[i]) {
        ++t.tp;
      } else if (predicted) {
        ++t.fp;
      } else if (truth[i]) {
        ++t.fn;
      }
    }
    const auto s = summarize(per_class);
    curve.points.push_back({theta, s.f1_micro, s.f1_macro});
    // >= walks the tie toward the largest threshold.
    if (s.f1_micro >= curve.best_f1_micro) {
      curve.best_f1_micro = s.f1_micro;
      curve.best_threshold = theta;
    }
  }
  return curve;
}

CalibrationCurve calibrate_threshold(const ProbabilityTable& table, const GoldLabels& gold,
                                     const ThresholdGrid& grid) {
  return calibrate_ensemble(std::span<const ProbabilityTable>(&table, 1), gold, grid);
}

ZeroShotResult run_zero_shot(const Corpus& corpus, const std::set<std::string>& holdout,
                             const TrainingOptions& options, const ThresholdGrid& grid,
                             const EpochCallback& on_epoch) {
  if (!corpus.has_gold()) throw DataError("zero-shot calibration needs gold labels");
  grid.validate();
  auto [train_split, eval_split] = split_by_language(corpus, holdout);
  auto model = train(train_split, options.featurizer, options.preprocess, options.trainer, on_epoch);
  auto table = predict_probs(model, eval_split);
  auto curve = calibrate_threshold(table, *eval_split.gold(), grid);
  return {std::move(model), std::move(table), std::move(curve)};
}

CalibrationCurve calibrate_zero_shot(const Corpus& corpus, const std::set<std::string>& holdout,
                                     const TrainingOptions& options, const ThresholdGrid& grid) {
  return run_zero_shot(corpus, holdout, options, grid).curve;
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

void write_curve_csv(std::ostream& out, const CalibrationCurve& curve) {
  out << "threshold,f1_micro,f1_macro\n";
  for (const auto& p : curve.points) {
    out << format_number(p.threshold) << ',' << format_number(p.f1_micro) << ','
        << format_number(p.f1_macro) << '\n';
  }
  out << "# best_threshold=" << format_number(curve.best_threshold)
      << " best_f1_micro=" << format_number(curve.best_f1_micro) << '\n';
}

std::string score_report_json(const ScoreReport& report, const TechniqueVocabulary& vocabulary) {
  auto j = summary_json(report.global, vocabulary);
  nlohmann::ordered_json langs = nlohmann::ordered_json::object();
  for (const auto& [lang, summary] : report.per_language) langs[lang] = summary_json(summary, vocabulary);
  j["per_language"] = std::move(langs);
  return j.dump(2) + "\n";
}

}  // namespace persuasion
