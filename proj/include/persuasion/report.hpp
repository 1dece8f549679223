#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "persuasion/corpus.hpp"
#include "persuasion/evaluate.hpp"
#include "persuasion/probability_table.hpp"

namespace persuasion {

/// Gold label counts per (language, technique). Zero cells are kept.
struct DistributionMatrix {
  std::vector<std::string> languages;   // sorted
  std::vector<std::string> techniques;  // vocabulary order
  std::vector<std::vector<std::size_t>> counts;  // [language][technique]

  std::vector<std::size_t> language_totals() const;
  std::vector<std::size_t> technique_totals() const;
  std::size_t total() const;
};

/// Throws DataError when the corpus has no gold labels.
DistributionMatrix label_distribution(const Corpus& corpus);

/// Header `language,<techniques...>,total`, one row per language, then a
/// `total` row.
void write_distribution_csv(std::ostream& out, const DistributionMatrix& matrix);

struct NamedTable {
  std::string name;
  ProbabilityTable table;
};

/// One curve point of one model on one language. `point` is empty for a
/// requested language that has no rows in the table.
struct LanguageCurveRow {
  std::string model;
  std::string language;
  std::optional<CurvePoint> point;
};

/// For each model and each language (sorted by code), the calibration sweep
/// restricted to that language's rows. `languages` adds languages that must
/// appear even when a table has no rows for them.
std::vector<LanguageCurveRow> per_language_curves(std::span<const NamedTable> tables,
                                                  const GoldLabels& gold, const ThresholdGrid& grid,
                                                  const std::vector<std::string>& languages = {});

/// `model,language,threshold,f1_micro,f1_macro`; skipped languages print NA.
void write_language_curves_csv(std::ostream& out, std::span<const LanguageCurveRow> rows);

}  // namespace persuasion
