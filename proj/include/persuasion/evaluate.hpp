#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "persuasion/baseline.hpp"
#include "persuasion/corpus.hpp"
#include "persuasion/probability_table.hpp"

namespace persuasion {

/// True/false positive and false negative counts.
struct Tally {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  /// 2TP / (2TP + FP + FN), 0 when the denominator is 0.
  double f1() const;
  double precision() const;
  double recall() const;
  bool active() const noexcept { return tp + fp + fn > 0; }

  Tally& operator+=(const Tally& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const Tally&) const = default;
};

/// Micro/macro figures over one set of keys.
struct ScoreSummary {
  Tally total;
  std::vector<Tally> per_class;  // by vocabulary index
  double f1_micro = 0.0;
  double f1_macro = 0.0;
};

struct ScoreReport {
  ScoreSummary global;
  std::map<std::string, ScoreSummary> per_language;

  double f1_micro() const { return global.f1_micro; }
  double f1_macro() const { return global.f1_macro; }
};

/// Predicts every class with p >= theta. Throws std::invalid_argument when
/// theta is outside [0,1].
LabelMap apply_threshold(const ProbabilityTable& table, double theta);

/// Pooled over all (key, class) pairs; keys missing on either side count as
/// empty sets. Throws DataError for names outside the vocabulary.
double f1_micro(const LabelMap& pred, const LabelMap& gold, const TechniqueVocabulary& vocabulary);

/// Unweighted mean of per-class F1 over classes with TP + FP + FN > 0.
double f1_macro(const LabelMap& pred, const LabelMap& gold, const TechniqueVocabulary& vocabulary);

/// Global and per-language report. Keys without an entry in `languages` are
/// counted globally only.
ScoreReport score(const LabelMap& pred, const LabelMap& gold, const TechniqueVocabulary& vocabulary,
                  const LanguageMap& languages = {});

/// Per-key union; keys present in one mapping keep their set.
LabelMap ensemble_union(const LabelMap& a, const LabelMap& b, const TechniqueVocabulary& vocabulary);

struct ThresholdGrid {
  double start = 0.05;
  double stop = 0.95;
  double step = 0.01;

  /// Throws ConfigError unless 0 <= start < stop <= 1 and step > 0.
  void validate() const;
  /// start + i*step for every i that stays <= stop, each rounded to 10
  /// decimals so 0.05 + 9 * 0.05 is exactly 0.5.
  std::vector<double> points() const;
};

struct CurvePoint {
  double threshold = 0.0;
  double f1_micro = 0.0;
  double f1_macro = 0.0;

  bool operator==(const CurvePoint&) const = default;
};

struct CalibrationCurve {
  std::vector<CurvePoint> points;
  double best_threshold = 0.0;
  double best_f1_micro = 0.0;

  bool operator==(const CalibrationCurve&) const = default;
};

/// Sweeps the grid and selects the largest threshold with maximal micro F1.
/// Only keys present in the table are scored; gold keys outside it are ignored.
/// Throws DataError on an empty table.
CalibrationCurve calibrate_threshold(const ProbabilityTable& table, const GoldLabels& gold,
                                     const ThresholdGrid& grid);

/// As calibrate_threshold where each grid point decodes every table and
/// merges the label sets with ensemble_union.
CalibrationCurve calibrate_ensemble(std::span<const ProbabilityTable> tables, const GoldLabels& gold,
                                    const ThresholdGrid& grid);

struct TrainingOptions {
  FeaturizerConfig featurizer;
  PreprocessConfig preprocess;
  TrainerConfig trainer;
};

struct ZeroShotResult {
  BaselineModel model;
  ProbabilityTable table;
  CalibrationCurve curve;
};

/// Trains on the languages outside `holdout`, predicts the holdout languages
/// and calibrates against their gold labels.
ZeroShotResult run_zero_shot(const Corpus& corpus, const std::set<std::string>& holdout,
                             const TrainingOptions& options, const ThresholdGrid& grid,
                             const EpochCallback& on_epoch = {});

CalibrationCurve calibrate_zero_shot(const Corpus& corpus, const std::set<std::string>& holdout,
                                     const TrainingOptions& options, const ThresholdGrid& grid);

/// `threshold,f1_micro,f1_macro` rows followed by a `# best_threshold=...` line.
void write_curve_csv(std::ostream& out, const CalibrationCurve& curve);
std::string score_report_json(const ScoreReport& report, const TechniqueVocabulary& vocabulary);

/// Shortest round-trip decimal form of `value`.
std::string format_number(double value);

}  // namespace persuasion
