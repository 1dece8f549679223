#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "persuasion/corpus.hpp"

namespace persuasion {

/// Per-paragraph class probabilities, ordered by vocabulary index.
class ProbabilityTable {
 public:
  struct Row {
    ParagraphKey key;
    std::string language;
    std::vector<double> probs;
  };

  ProbabilityTable() = default;
  /// Throws DataError on duplicate keys or probabilities outside [0,1] and
  /// VocabularyMismatch when a row's width differs from the vocabulary.
  ProbabilityTable(TechniqueVocabulary vocabulary, std::vector<Row> rows);

  const TechniqueVocabulary& vocabulary() const noexcept { return vocabulary_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }

  LanguageMap language_map() const;
  /// Rows whose language equals `language`, in original order.
  ProbabilityTable restrict_to_language(const std::string& language) const;

 private:
  TechniqueVocabulary vocabulary_;
  std::vector<Row> rows_;
};

/// JSON Lines: {"article_id","paragraph_id","language","probs"} per row.
void write_probability_table(std::ostream& out, const ProbabilityTable& table);
void save_probability_table(const ProbabilityTable& table, const std::filesystem::path& path);

ProbabilityTable parse_probability_table(std::istream& in, const std::string& source,
                                         const TechniqueVocabulary& vocabulary);
ProbabilityTable load_probability_table(const std::filesystem::path& path,
                                        const TechniqueVocabulary& vocabulary);

}  // namespace persuasion
