#include "persuasion/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "persuasion/error.hpp"

namespace persuasion {

namespace {

bool has_forbidden_char(std::string_view s, std::string_view forbidden) {
  return s.find_first_of(forbidden) != std::string_view::npos;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

// getline that drops a trailing CR.
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

ParagraphKey parse_key(std::string_view article, std::string_view paragraph,
                       const std::string& source, std::size_t line_no) {
  if (article.empty()) throw DataError::at(source, line_no, "empty article id");
  std::uint64_t id = 0;
  const auto* first = paragraph.data();
  const auto* last = paragraph.data() + paragraph.size();
  const auto [ptr, ec] = std::from_chars(first, last, id);
  if (paragraph.empty() || ec != std::errc{} || ptr != last) {
    throw DataError::at(source, line_no,
                        "paragraph id '" + std::string(paragraph) + "' is not a non-negative integer");
  }
  return ParagraphKey{std::string(article), id};
}

const LabelSet kEmptyLabels;

}  // namespace

TechniqueVocabulary::TechniqueVocabulary(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw DataError("technique vocabulary is empty");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    const auto& n = names_[i];
    if (n.empty()) throw DataError("technique name " + std::to_string(i) + " is empty");
    if (has_forbidden_char(n, "\t\n\r,")) {
      throw DataError("technique name '" + n + "' contains a tab, newline or comma");
    }
    if (!index_.emplace(n, i).second) throw DataError("duplicate technique name '" + n + "'");
  }
}

std::optional<std::size_t> TechniqueVocabulary::find(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t TechniqueVocabulary::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw DataError("unknown technique '" + std::string(name) + "'");
}

std::string to_string(const ParagraphKey& key) {
  return key.article_id + "/" + std::to_string(key.paragraph_id);
}

bool is_valid_language_code(std::string_view code) {
  if (code.empty() || code.front() < 'a' || code.front() > 'z') return false;
  return std::all_of(code.begin(), code.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

Corpus::Corpus(TechniqueVocabulary vocabulary, std::vector<Paragraph> paragraphs,
               std::optional<GoldLabels> gold)
    : vocabulary_(std::move(vocabulary)), paragraphs_(std::move(paragraphs)), gold_(std::move(gold)) {
  std::set<ParagraphKey> keys;
  for (const auto& p : paragraphs_) {
    if (p.key.article_id.empty() || has_forbidden_char(p.key.article_id, "\t\n\r")) {
      throw DataError("invalid article id '" + p.key.article_id + "'");
    }
    if (!is_valid_language_code(p.language)) {
      throw DataError("invalid language code '" + p.language + "' on paragraph " + to_string(p.key));
    }
    if (!keys.insert(p.key).second) throw DataError("duplicate paragraph key " + to_string(p.key));
  }
  if (gold_) {
    for (const auto& [key, labels] : *gold_) {
      if (!keys.contains(key)) throw DataError("gold key " + to_string(key) + " is not in the corpus");
      for (const auto& name : labels) vocabulary_.index_of(name);
    }
  }
}

const LabelSet& Corpus::gold_for(const ParagraphKey& key) const {
  if (!gold_) return kEmptyLabels;
  const auto it = gold_->find(key);
  return it == gold_->end() ? kEmptyLabels : it->second;
}

std::set<std::string> Corpus::languages() const {
  std::set<std::string> out;
  for (const auto& p : paragraphs_) out.insert(p.language);
  return out;
}

LanguageMap Corpus::language_map() const {
  LanguageMap out;
  for (const auto& p : paragraphs_) out.emplace(p.key, p.language);
  return out;
}

bool Corpus::contains(const ParagraphKey& key) const {
  return std::any_of(paragraphs_.begin(), paragraphs_.end(),
                     [&](const Paragraph& p) { return p.key == key; });
}

Corpus Corpus::with_gold(GoldLabels gold) const {
  return Corpus(vocabulary_, paragraphs_, std::move(gold));
}

Corpus merge_corpora(const std::vector<Corpus>& parts) {
  if (parts.empty()) throw DataError("no corpora to merge");
  const auto& vocabulary = parts.front().vocabulary();
  std::vector<Paragraph> paragraphs;
  GoldLabels gold;
  bool all_gold = true;
  for (const auto& part : parts) {
    if (!(part.vocabulary() == vocabulary)) {
      throw VocabularyMismatch("cannot merge corpora with different vocabularies");
    }
    paragraphs.insert(paragraphs.end(), part.paragraphs().begin(), part.paragraphs().end());
    if (part.has_gold()) {
      gold.insert(part.gold()->begin(), part.gold()->end());
    } else {
      all_gold = false;
    }
  }
  if (!all_gold) return Corpus(vocabulary, std::move(paragraphs));
  return Corpus(vocabulary, std::move(paragraphs), std::move(gold));
}

TechniqueVocabulary parse_vocabulary(std::istream& in, const std::string& source) {
  std::vector<std::string> names;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) throw DataError::at(source, line_no, "blank line in vocabulary");
    if (line.find('\t') != std::string::npos || line.find(',') != std::string::npos) {
      throw DataError::at(source, line_no, "technique name contains a tab or comma");
    }
    if (!seen.insert(line).second) {
      throw DataError::at(source, line_no, "duplicate technique name '" + line + "'");
    }
    names.push_back(line);
  }
  if (names.empty()) throw DataError(source + ": vocabulary file is empty");
  return TechniqueVocabulary(std::move(names));
}

TechniqueVocabulary load_vocabulary(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_vocabulary(in, path.string());
}

Corpus parse_corpus(std::istream& in, const std::string& source, const std::string& language,
                    const TechniqueVocabulary& vocabulary) {
  if (!is_valid_language_code(language)) throw DataError("invalid language code '" + language + "'");
  std::vector<Paragraph> paragraphs;
  std::set<ParagraphKey> keys;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line)) {
    ++line_no;
    const auto first_tab = line.find('\t');
    const auto second_tab =
        first_tab == std::string::npos ? std::string::npos : line.find('\t', first_tab + 1);
    if (second_tab == std::string::npos) {
      throw DataError::at(source, line_no, "expected 3 tab-separated fields");
    }
    std::string_view view(line);
    auto key = parse_key(view.substr(0, first_tab),
                         view.substr(first_tab + 1, second_tab - first_tab - 1), source, line_no);
    if (!keys.insert(key).second) {
      throw DataError::at(source, line_no, "duplicate paragraph key " + to_string(key));
    }
    paragraphs.push_back(Paragraph{std::move(key), language, line.substr(second_tab + 1)});
  }
  return Corpus(vocabulary, std::move(paragraphs));
}

Corpus load_corpus(const std::filesystem::path& template_path, const std::string& language,
                   const TechniqueVocabulary& vocabulary) {
  auto in = open_input(template_path);
  return parse_corpus(in, template_path.string(), language, vocabulary);
}

LabelMap parse_label_file(std::istream& in, const std::string& source,
                          const TechniqueVocabulary& vocabulary) {
  LabelMap labels;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line)) {
    ++line_no;
    const auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw DataError::at(source, line_no,
                          "expected 3 tab-separated fields, found " + std::to_string(fields.size()));
    }
    auto key = parse_key(fields[0], fields[1], source, line_no);
    LabelSet names;
    if (!fields[2].empty()) {
      for (auto name : split(fields[2], ',')) {
        if (!vocabulary.contains(name)) {
          throw DataError::at(source, line_no, "unknown technique '" + std::string(name) + "'");
        }
        names.emplace(name);
      }
    }
    if (labels.contains(key)) {
      throw DataError::at(source, line_no, "duplicate paragraph key " + to_string(key));
    }
    labels.emplace(std::move(key), std::move(names));
  }
  return labels;
}

LabelMap read_label_file(const std::filesystem::path& path, const TechniqueVocabulary& vocabulary) {
  auto in = open_input(path);
  return parse_label_file(in, path.string(), vocabulary);
}

GoldLabels load_gold(const std::filesystem::path& path, const Corpus& corpus) {
  auto gold = read_label_file(path, corpus.vocabulary());
  const auto languages = corpus.language_map();
  for (const auto& [key, labels] : gold) {
    if (!languages.contains(key)) {
      throw DataError(path.string() + ": key " + to_string(key) + " is not in the corpus");
    }
  }
  return gold;
}

void write_submission(std::ostream& out, const LabelMap& predictions,
                      const TechniqueVocabulary& vocabulary) {
  // std::map iteration already yields (article_id, paragraph_id) order.
  for (const auto& [key, names] : predictions) {
    std::vector<std::size_t> indices;
    indices.reserve(names.size());
    for (const auto& n : names) indices.push_back(vocabulary.index_of(n));
    std::sort(indices.begin(), indices.end());
    out << key.article_id << '\t' << key.paragraph_id << '\t';
    for (std::size_t i = 0; i < indices.size(); ++i) {
      if (i) out << ',';
      out << vocabulary.name(indices[i]);
    }
    out << '\n';
  }
}

void emit_submission(const LabelMap& predictions, const TechniqueVocabulary& vocabulary,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  write_submission(out, predictions, vocabulary);
  out.flush();
  if (!out) throw DataError("failed writing " + path.string());
}

std::pair<Corpus, Corpus> split_by_language(const Corpus& corpus,
                                            const std::set<std::string>& holdout) {
  const auto languages = corpus.languages();
  for (const auto& lang : holdout) {
    if (!languages.contains(lang)) {
      throw DataError("holdout language '" + lang + "' does not occur in the corpus");
    }
  }
  if (!languages.empty() && holdout.size() == languages.size()) {
    throw DataError("holdout covers every language; nothing left to train on");
  }

  std::vector<Paragraph> train, eval;
  GoldLabels train_gold, eval_gold;
  for (const auto& p : corpus.paragraphs()) {
    const bool held = holdout.contains(p.language);
    (held ? eval : train).push_back(p);
    if (corpus.has_gold()) {
      const auto it = corpus.gold()->find(p.key);
      if (it != corpus.gold()->end()) (held ? eval_gold : train_gold).insert(*it);
    }
  }
  if (!corpus.has_gold()) {
    return {Corpus(corpus.vocabulary(), std::move(train)), Corpus(corpus.vocabulary(), std::move(eval))};
  }
  return {Corpus(corpus.vocabulary(), std::move(train), std::move(train_gold)),
          Corpus(corpus.vocabulary(), std::move(eval), std::move(eval_gold))};
}

}  // namespace persuasion
