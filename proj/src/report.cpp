#include "persuasion/report.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <set>

#include "persuasion/error.hpp"

namespace persuasion {

std::vector<std::size_t> DistributionMatrix::language_totals() const {
  std::vector<std::size_t> out;
  out.reserve(counts.size());
  for (const auto& row : counts) out.push_back(std::accumulate(row.begin(), row.end(), std::size_t{0}));
  return out;
}

std::vector<std::size_t> DistributionMatrix::technique_totals() const {
  std::vector<std::size_t> out(techniques.size(), 0);
  for (const auto& row : counts) {
    for (std::size_t t = 0; t < row.size(); ++t) out[t] += row[t];
  }
  return out;
}

std::size_t DistributionMatrix::total() const {
  const auto rows = language_totals();
  return std::accumulate(rows.begin(), rows.end(), std::size_t{0});
}

DistributionMatrix label_distribution(const Corpus& corpus) {
  if (!corpus.has_gold()) throw DataError("label distribution needs gold labels");
  const auto& vocabulary = corpus.vocabulary();
  DistributionMatrix m;
  const auto languages = corpus.languages();
  m.languages.assign(languages.begin(), languages.end());
  m.techniques = vocabulary.names();
  m.counts.assign(m.languages.size(), std::vector<std::size_t>(vocabulary.size(), 0));
  for (const auto& p : corpus.paragraphs()) {
    const auto row = static_cast<std::size_t>(
        std::lower_bound(m.languages.begin(), m.languages.end(), p.language) - m.languages.begin());
    for (const auto& name : corpus.gold_for(p.key)) ++m.counts[row][vocabulary.index_of(name)];
  }
  return m;
}

void write_distribution_csv(std::ostream& out, const DistributionMatrix& m) {
  out << "language";
  for (const auto& t : m.techniques) out << ',' << t;
  out << ",total\n";
  const auto row_totals = m.language_totals();
  for (std::size_t r = 0; r < m.languages.size(); ++r) {
    out << m.languages[r];
    for (auto c : m.counts[r]) out << ',' << c;
    out << ',' << row_totals[r] << '\n';
  }
  out << "total";
  for (auto c : m.technique_totals()) out << ',' << c;
  out << ',' << m.total() << '\n';
}

std::vector<LanguageCurveRow> per_language_curves(std::span<const NamedTable> tables,
                                                  const GoldLabels& gold, const ThresholdGrid& grid,
                                                  const std::vector<std::string>& languages) {
  if (tables.empty()) return {};
  const auto& vocabulary = tables.front().table.vocabulary();
  for (const auto& t : tables) {
    if (!(t.table.vocabulary() == vocabulary)) {
      throw VocabularyMismatch("model '" + t.name + "' uses a different vocabulary");
    }
  }

  std::vector<LanguageCurveRow> rows;
  for (const auto& t : tables) {
    std::set<std::string> langs(languages.begin(), languages.end());
    for (const auto& r : t.table.rows()) langs.insert(r.language);
    for (const auto& lang : langs) {
      const auto restricted = t.table.restrict_to_language(lang);
      if (restricted.empty()) {
        rows.push_back({t.name, lang, std::nullopt});
        continue;
      }
      for (const auto& point : calibrate_threshold(restricted, gold, grid).points) {
        rows.push_back({t.name, lang, point});
      }
    }
  }
  return rows;
}

void write_language_curves_csv(std::ostream& out, std::span<const LanguageCurveRow> rows) {
  out << "model,language,threshold,f1_micro,f1_macro\n";
  for (const auto& r : rows) {
    out << r.model << ',' << r.language << ',';
    if (r.point) {
      out << format_number(r.point->threshold) << ',' << format_number(r.point->f1_micro) << ','
          << format_number(r.point->f1_macro) << '\n';
    } else {
      out << "NA,NA,NA\n";
    }
  }
}

}  // namespace persuasion
