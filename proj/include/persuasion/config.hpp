#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "persuasion/baseline.hpp"
#include "persuasion/corpus.hpp"
#include "persuasion/evaluate.hpp"
#include "persuasion/preprocess.hpp"

namespace persuasion {

struct LanguageSource {
  std::string code;
  std::filesystem::path template_path;
  std::filesystem::path gold_path;
};

/// Experiment configuration. JSON schema:
///
///   {
///     "vocabulary": "techniques.txt",
///     "languages": [{"code": "en", "template": "en.tsv", "gold": "en.labels"}, ...],
///     "preprocess": "ws_punct,entities",            (optional, default none)
///     "featurizer": {"ngram_min", "ngram_max", "hash_dim", "max_chars"},
///     "trainer": {"epochs", "learning_rate", "batch_size"},
///     "grid": {"start", "stop", "step"},
///     "seen_threshold": 0.30, "unseen_threshold": 0.28,
///     "threshold_adjust": 0.01, "seed": 42, "holdout": ["pl", "ru"]
///   }
///
/// Every block other than "vocabulary" and "languages" is optional. Relative
/// paths resolve against the config file's directory. The listed languages
/// are the seen ones; any other language is decoded as unseen.
struct RunConfig {
  std::filesystem::path vocabulary_path;
  std::vector<LanguageSource> languages;
  PreprocessConfig preprocess;
  FeaturizerConfig featurizer;
  TrainerConfig trainer;
  ThresholdGrid grid;
  double seen_threshold = 0.30;
  double unseen_threshold = 0.28;
  double threshold_adjust = 0.01;
  std::vector<std::string> holdout;

  std::set<std::string> seen_languages() const;
  TrainingOptions training_options() const { return {featurizer, preprocess, trainer}; }

  /// Throws ConfigError on any violated constraint.
  void validate() const;
};

RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Loads the vocabulary, every language template and its gold labels.
Corpus load_config_corpus(const RunConfig& config);

}  // namespace persuasion
