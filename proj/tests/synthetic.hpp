#pragma once

// Generated multilingual corpus with class-correlated keyword planting.

#include <random>
#include <string>
#include <vector>

#include "persuasion/corpus.hpp"

namespace testing {

struct SyntheticSpec {
  std::vector<std::string> languages = {"en", "fr", "de", "pl"};
  std::size_t per_language = 150;
  std::size_t classes = 5;
  std::uint64_t seed = 7;
  /// Probability that a gold class plants each of its two keywords.
  double plant_rate = 0.85;
  /// Probability that a non-gold class leaks one keyword.
  double distractor_rate = 0.08;
};

struct SyntheticCorpus {
  persuasion::TechniqueVocabulary vocabulary;
  std::vector<persuasion::Paragraph> paragraphs;
  persuasion::GoldLabels gold;

  persuasion::Corpus corpus() const { return persuasion::Corpus(vocabulary, paragraphs, gold); }
};

namespace detail {

inline std::string pseudo_word(std::mt19937_64& rng, std::size_t syllables) {
  static const std::string consonants = "bcdfghjklmnprstvz";
  static const std::string vowels = "aeiou";
  std::string w;
  for (std::size_t i = 0; i < syllables; ++i) {
    w += consonants[rng() % consonants.size()];
    w += vowels[rng() % vowels.size()];
  }
  return w;
}

}  // namespace detail

inline SyntheticCorpus make_synthetic_corpus(const SyntheticSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::vector<std::string> names;
  for (std::size_t c = 0; c < spec.classes; ++c) names.push_back("Technique_" + std::to_string(c));

  // Shared keywords per class, plus one language-specific variant each.
  std::vector<std::vector<std::string>> keywords(spec.classes);
  for (auto& k : keywords) {
    for (int i = 0; i < 3; ++i) k.push_back(detail::pseudo_word(rng, 3) + "x");
  }
  const std::vector<double> priors = {0.45, 0.30, 0.20, 0.12, 0.08, 0.05, 0.04, 0.03};

  SyntheticCorpus out{persuasion::TechniqueVocabulary(names), {}, {}};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t l = 0; l < spec.languages.size(); ++l) {
    const auto& lang = spec.languages[l];
    std::vector<std::string> filler;
    for (int i = 0; i < 120; ++i) filler.push_back(detail::pseudo_word(rng, 1 + rng() % 3));
    for (std::size_t i = 0; i < spec.per_language; ++i) {
      persuasion::ParagraphKey key{lang + "_art" + std::to_string(i / 4), i % 4};
      persuasion::LabelSet gold;
      std::vector<std::string> words;
      const std::size_t length = 12 + rng() % 20;
      for (std::size_t w = 0; w < length; ++w) words.push_back(filler[rng() % filler.size()]);
      for (std::size_t c = 0; c < spec.classes; ++c) {
        const double prior = priors[c % priors.size()];
        if (u(rng) < prior) {
          gold.insert(names[c]);
          for (int k = 0; k < 2; ++k) {
            if (u(rng) < spec.plant_rate) {
              const auto& kw = keywords[c][rng() % keywords[c].size()];
              words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng() % (words.size() + 1)), kw);
            }
          }
        } else if (u(rng) < spec.distractor_rate) {
          const auto& kw = keywords[c][rng() % keywords[c].size()];
          words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng() % (words.size() + 1)), kw);
        }
      }
      std::string text;
      for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
      out.paragraphs.push_back({key, lang, text});
      out.gold.emplace(key, std::move(gold));
    }
  }
  return out;
}

}  // namespace testing
