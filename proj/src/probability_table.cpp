#include "persuasion/probability_table.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "json.hpp"
#include "persuasion/error.hpp"

namespace persuasion {

using ordered_json = nlohmann::ordered_json;

ProbabilityTable::ProbabilityTable(TechniqueVocabulary vocabulary, std::vector<Row> rows)
    : vocabulary_(std::move(vocabulary)), rows_(std::move(rows)) {
  std::set<ParagraphKey> keys;
  for (const auto& row : rows_) {
    if (row.probs.size() != vocabulary_.size()) {
      throw VocabularyMismatch("row " + to_string(row.key) + " has " +
                               std::to_string(row.probs.size()) + " probabilities, vocabulary has " +
                               std::to_string(vocabulary_.size()));
    }
    for (double p : row.probs) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw DataError("row " + to_string(row.key) + " has a probability outside [0,1]");
      }
    }
    if (!keys.insert(row.key).second) {
      throw DataError("duplicate probability row " + to_string(row.key));
    }
  }
}

LanguageMap ProbabilityTable::language_map() const {
  LanguageMap out;
  for (const auto& row : rows_) out.emplace(row.key, row.language);
  return out;
}

ProbabilityTable ProbabilityTable::restrict_to_language(const std::string& language) const {
  std::vector<Row> rows;
  for (const auto& row : rows_) {
    if (row.language == language) rows.push_back(row);
  }
  return ProbabilityTable(vocabulary_, std::move(rows));
}

void write_probability_table(std::ostream& out, const ProbabilityTable& table) {
  for (const auto& row : table.rows()) {
    ordered_json line;
    line["article_id"] = row.key.article_id;
    line["paragraph_id"] = row.key.paragraph_id;
    line["language"] = row.language;
    line["probs"] = row.probs;
    out << line.dump() << '\n';
  }
}

void save_probability_table(const ProbabilityTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  write_probability_table(out, table);
  out.flush();
  if (!out) throw DataError("failed writing " + path.string());
}

ProbabilityTable parse_probability_table(std::istream& in, const std::string& source,
                                         const TechniqueVocabulary& vocabulary) {
  std::vector<ProbabilityTable::Row> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    ProbabilityTable::Row row;
    try {
      const auto obj = nlohmann::json::parse(line);
      row.key.article_id = obj.at("article_id").get<std::string>();
      const auto& pid = obj.at("paragraph_id");
      if (!pid.is_number_unsigned()) {
        throw DataError::at(source, line_no, "paragraph_id must be a non-negative integer");
      }
      row.key.paragraph_id = pid.get<std::uint64_t>();
      row.language = obj.at("language").get<std::string>();
      row.probs = obj.at("probs").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError::at(source, line_no, std::string("malformed row: ") + e.what());
    }
    if (row.probs.size() != vocabulary.size()) {
      throw VocabularyMismatch(source + ":" + std::to_string(line_no) + ": " +
                               std::to_string(row.probs.size()) + " probabilities for a vocabulary of " +
                               std::to_string(vocabulary.size()));
    }
    rows.push_back(std::move(row));
  }
  return ProbabilityTable(vocabulary, std::move(rows));
}

ProbabilityTable load_probability_table(const std::filesystem::path& path,
                                        const TechniqueVocabulary& vocabulary) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_probability_table(in, path.string(), vocabulary);
}

}  // namespace persuasion
