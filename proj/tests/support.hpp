#pragma once

// Test-only helpers: scratch directories, file I/O, random generators and
// the brute-force scoring oracle.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "persuasion/corpus.hpp"
#include "persuasion/probability_table.hpp"

namespace testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    std::string pattern = (fs::temp_directory_path() / "persuasion-test-XXXXXX").string();
    if (::mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline persuasion::TechniqueVocabulary make_vocabulary(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("T" + std::to_string(i));
  return persuasion::TechniqueVocabulary(names);
}

/// Independent TP/FP/FN counter: explicit loop over every (key, class) pair.
struct OracleCounts {
  std::vector<std::size_t> tp, fp, fn;

  double micro() const {
    std::size_t t = 0, f = 0, n = 0;
    for (std::size_t c = 0; c < tp.size(); ++c) {
      t += tp[c];
      f += fp[c];
      n += fn[c];
    }
    return 2 * t + f + n == 0 ? 0.0 : 2.0 * t / static_cast<double>(2 * t + f + n);
  }
  double macro() const {
    double sum = 0.0;
    std::size_t active = 0;
    for (std::size_t c = 0; c < tp.size(); ++c) {
      const auto den = 2 * tp[c] + fp[c] + fn[c];
      if (den == 0) continue;
      sum += 2.0 * tp[c] / static_cast<double>(den);
      ++active;
    }
    return active ? sum / static_cast<double>(active) : 0.0;
  }
  double recall() const {
    std::size_t t = 0, n = 0;
    for (std::size_t c = 0; c < tp.size(); ++c) {
      t += tp[c];
      n += fn[c];
    }
    return t + n == 0 ? 0.0 : static_cast<double>(t) / static_cast<double>(t + n);
  }
};

inline OracleCounts brute_force_counts(const persuasion::LabelMap& pred, const persuasion::LabelMap& gold,
                                       const persuasion::TechniqueVocabulary& vocabulary) {
  OracleCounts o;
  o.tp.assign(vocabulary.size(), 0);
  o.fp.assign(vocabulary.size(), 0);
  o.fn.assign(vocabulary.size(), 0);
  std::vector<persuasion::ParagraphKey> keys;
  for (const auto& [k, _] : pred) keys.push_back(k);
  for (const auto& [k, _] : gold) {
    if (!pred.count(k)) keys.push_back(k);
  }
  for (const auto& key : keys) {
    for (std::size_t c = 0; c < vocabulary.size(); ++c) {
      const auto& name = vocabulary.name(c);
      const bool p = pred.count(key) && pred.at(key).count(name);
      const bool g = gold.count(key) && gold.at(key).count(name);
      if (p && g) ++o.tp[c];
      if (p && !g) ++o.fp[c];
      if (!p && g) ++o.fn[c];
    }
  }
  return o;
}

/// Random label mapping over keys a0/0 .. a{n-1}/0 with independent inclusion.
inline persuasion::LabelMap random_labels(std::mt19937_64& rng, std::size_t keys,
                                          const persuasion::TechniqueVocabulary& vocabulary,
                                          double density = 0.35) {
  std::bernoulli_distribution pick(density);
  persuasion::LabelMap m;
  for (std::size_t i = 0; i < keys; ++i) {
    auto& set = m[{"a" + std::to_string(i / 3), i % 3}];
    for (const auto& name : vocabulary.names()) {
      if (pick(rng)) set.insert(name);
    }
  }
  return m;
}

inline persuasion::ProbabilityTable random_table(std::mt19937_64& rng, std::size_t rows,
                                                 const persuasion::TechniqueVocabulary& vocabulary,
                                                 const std::string& language = "en") {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<persuasion::ProbabilityTable::Row> out;
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<double> probs(vocabulary.size());
    // Coarse values create many exact ties with grid points.
    for (auto& p : probs) p = std::round(u(rng) * 100.0) / 100.0;
    out.push_back({{"a" + std::to_string(i / 3), i % 3}, language, std::move(probs)});
  }
  return persuasion::ProbabilityTable(vocabulary, std::move(out));
}

/// Random string over a mix of ASCII, punctuation, whitespace, entity
/// fragments, accented letters, CJK and emoji.
inline std::string random_unicode(std::mt19937_64& rng, std::size_t max_pieces = 24) {
  static const std::vector<std::string> pieces = {
      "a", "b", "Z", "0", "7", "_", ".", ",", "!", "?", ";", ":", "-", "--", "...", "!!", "?!",
      " ", "  ", "\t", "\n", "\u00a0", "\u3000", "\u2009", "@", "#", "##", "http://", "https://",
      "HTTP://", "://", "x.org", "me@site.org", "#tag", "{url}", "{email}", "{hashtag}", "{emoji}",
      "{", "}", "\u00e9", "\u00df", "\u0416", "\u4e2d", "\u0301", "\U0001F600", "\u2764", "\uFE0F",
      "\u200D", "\u00a9", "%", "+", "/", "www", "mail", "\xff", "\xc3"};
  std::uniform_int_distribution<std::size_t> len(0, max_pieces);
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::string s;
  const auto n = len(rng);
  for (std::size_t i = 0; i < n; ++i) s += pieces[pick(rng)];
  return s;
}

}  // namespace testing
