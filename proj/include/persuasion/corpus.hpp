#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace persuasion {

/// Ordered set of persuasion-technique class names.
class TechniqueVocabulary {
 public:
  TechniqueVocabulary() = default;

  /// Throws DataError on an empty list, a duplicate, an empty name or a name
  /// containing a tab, newline or comma.
  explicit TechniqueVocabulary(std::vector<std::string> names);

  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t size() const noexcept { return names_.size(); }
  bool empty() const noexcept { return names_.empty(); }
  const std::string& name(std::size_t index) const { return names_.at(index); }

  std::optional<std::size_t> find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name).has_value(); }
  /// Index of `name`; throws DataError for unknown names.
  std::size_t index_of(std::string_view name) const;

  friend bool operator==(const TechniqueVocabulary& a, const TechniqueVocabulary& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct ParagraphKey {
  std::string article_id;
  std::uint64_t paragraph_id = 0;

  auto operator<=>(const ParagraphKey&) const = default;
  bool operator==(const ParagraphKey&) const = default;
};

std::string to_string(const ParagraphKey& key);

struct Paragraph {
  ParagraphKey key;
  std::string language;
  std::string text;
};

using LabelSet = std::set<std::string>;
/// Paragraph → predicted or gold technique names.
using LabelMap = std::map<ParagraphKey, LabelSet>;
using GoldLabels = LabelMap;
/// Paragraph → language code.
using LanguageMap = std::map<ParagraphKey, std::string>;

/// True for free-form lowercase language tokens such as "en" or "pt_br".
bool is_valid_language_code(std::string_view code);

class Corpus {
 public:
  Corpus() = default;
  /// Validates key uniqueness and, when gold is present, that every gold key
  /// names a paragraph and every technique is in the vocabulary.
  Corpus(TechniqueVocabulary vocabulary, std::vector<Paragraph> paragraphs,
         std::optional<GoldLabels> gold = std::nullopt);

  const TechniqueVocabulary& vocabulary() const noexcept { return vocabulary_; }
  const std::vector<Paragraph>& paragraphs() const noexcept { return paragraphs_; }
  const std::optional<GoldLabels>& gold() const noexcept { return gold_; }
  bool has_gold() const noexcept { return gold_.has_value(); }
  std::size_t size() const noexcept { return paragraphs_.size(); }
  bool empty() const noexcept { return paragraphs_.empty(); }

  /// Gold set of `key`; empty when the key is not annotated.
  const LabelSet& gold_for(const ParagraphKey& key) const;
  std::set<std::string> languages() const;
  LanguageMap language_map() const;
  bool contains(const ParagraphKey& key) const;

  Corpus with_gold(GoldLabels gold) const;

 private:
  TechniqueVocabulary vocabulary_;
  std::vector<Paragraph> paragraphs_;
  std::optional<GoldLabels> gold_;
};

/// Concatenates corpora sharing one vocabulary. Gold is kept only when every
/// part carries gold.
Corpus merge_corpora(const std::vector<Corpus>& parts);

TechniqueVocabulary parse_vocabulary(std::istream& in, const std::string& source);
TechniqueVocabulary load_vocabulary(const std::filesystem::path& path);

/// Template format: `article_id<TAB>paragraph_id<TAB>text` per line.
Corpus parse_corpus(std::istream& in, const std::string& source, const std::string& language,
                    const TechniqueVocabulary& vocabulary);
Corpus load_corpus(const std::filesystem::path& template_path, const std::string& language,
                   const TechniqueVocabulary& vocabulary);

/// Label format: `article_id<TAB>paragraph_id<TAB>name1,name2,...`. Checks
/// names and duplicate keys but not key membership.
LabelMap parse_label_file(std::istream& in, const std::string& source,
                          const TechniqueVocabulary& vocabulary);
LabelMap read_label_file(const std::filesystem::path& path, const TechniqueVocabulary& vocabulary);

/// As read_label_file, and additionally rejects keys absent from `corpus`.
GoldLabels load_gold(const std::filesystem::path& path, const Corpus& corpus);

void write_submission(std::ostream& out, const LabelMap& predictions,
                      const TechniqueVocabulary& vocabulary);
/// Keys sorted by (article_id, paragraph_id), names by vocabulary index.
void emit_submission(const LabelMap& predictions, const TechniqueVocabulary& vocabulary,
                     const std::filesystem::path& path);

/// Partitions `corpus` into (languages not in holdout, languages in holdout).
std::pair<Corpus, Corpus> split_by_language(const Corpus& corpus,
                                            const std::set<std::string>& holdout);

}  // namespace persuasion
