#include "persuasion/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "persuasion/error.hpp"

namespace persuasion {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& object, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
  for (const auto& [key, _] : object.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

template <class T>
void read_optional(const json& object, const char* key, T& target) {
  if (object.contains(key)) target = object.at(key).get<T>();
}

}  // namespace

std::set<std::string> RunConfig::seen_languages() const {
  std::set<std::string> out;
  for (const auto& l : languages) out.insert(l.code);
  return out;
}

void RunConfig::validate() const {
  if (vocabulary_path.empty()) throw ConfigError("config needs a vocabulary path");
  if (languages.empty()) throw ConfigError("config language list is empty");
  std::set<std::string> codes;
  for (const auto& l : languages) {
    if (!is_valid_language_code(l.code)) throw ConfigError("invalid language code '" + l.code + "'");
    if (!codes.insert(l.code).second) throw ConfigError("language '" + l.code + "' listed twice");
    if (l.template_path.empty()) throw ConfigError("language '" + l.code + "' has no template path");
    if (l.gold_path.empty()) throw ConfigError("language '" + l.code + "' has no gold path");
  }
  for (const auto& [name, value] : {std::pair{"seen_threshold", seen_threshold},
                                    std::pair{"unseen_threshold", unseen_threshold}}) {
    if (!(value >= 0.0 && value <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0,1]");
  }
  if (!std::isfinite(threshold_adjust)) throw ConfigError("threshold_adjust must be finite");
  for (const auto& h : holdout) {
    if (!codes.contains(h)) throw ConfigError("holdout language '" + h + "' is not configured");
  }
  featurizer.validate();
  trainer.validate();
  grid.validate();
}

RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  RunConfig config;
  try {
    const auto j = json::parse(json_text);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown_keys(j,
                        {"vocabulary", "languages", "preprocess", "featurizer", "trainer", "grid",
                         "seen_threshold", "unseen_threshold", "threshold_adjust", "seed", "holdout"},
                        "config");
    if (!j.contains("vocabulary")) throw ConfigError("config needs a vocabulary path");
    config.vocabulary_path = resolve(base_dir, j.at("vocabulary").get<std::string>());
    if (j.contains("languages")) {
      for (const auto& l : j.at("languages")) {
        reject_unknown_keys(l, {"code", "template", "gold"}, "language entry");
        LanguageSource src;
        src.code = l.at("code").get<std::string>();
        if (l.contains("template")) src.template_path = resolve(base_dir, l.at("template").get<std::string>());
        if (l.contains("gold")) src.gold_path = resolve(base_dir, l.at("gold").get<std::string>());
        config.languages.push_back(std::move(src));
      }
    }
    if (j.contains("preprocess")) {
      config.preprocess = parse_preprocess_flags(j.at("preprocess").get<std::string>());
    }
    if (j.contains("featurizer")) {
      const auto& f = j.at("featurizer");
      reject_unknown_keys(f, {"ngram_min", "ngram_max", "hash_dim", "max_chars"}, "featurizer");
      read_optional(f, "ngram_min", config.featurizer.ngram_min);
      read_optional(f, "ngram_max", config.featurizer.ngram_max);
      read_optional(f, "hash_dim", config.featurizer.hash_dim);
      read_optional(f, "max_chars", config.featurizer.max_chars);
    }
    if (j.contains("trainer")) {
      const auto& t = j.at("trainer");
      reject_unknown_keys(t, {"epochs", "learning_rate", "batch_size"}, "trainer");
      read_optional(t, "epochs", config.trainer.epochs);
      read_optional(t, "learning_rate", config.trainer.learning_rate);
      read_optional(t, "batch_size", config.trainer.batch_size);
    }
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      reject_unknown_keys(g, {"start", "stop", "step"}, "grid");
      read_optional(g, "start", config.grid.start);
      read_optional(g, "stop", config.grid.stop);
      read_optional(g, "step", config.grid.step);
    }
    read_optional(j, "seen_threshold", config.seen_threshold);
    read_optional(j, "unseen_threshold", config.unseen_threshold);
    read_optional(j, "threshold_adjust", config.threshold_adjust);
    read_optional(j, "seed", config.trainer.seed);
    read_optional(j, "holdout", config.holdout);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  config.validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str(), path.parent_path());
}

Corpus load_config_corpus(const RunConfig& config) {
  const auto vocabulary = load_vocabulary(config.vocabulary_path);
  std::vector<Corpus> parts;
  parts.reserve(config.languages.size());
  for (const auto& l : config.languages) {
    auto part = load_corpus(l.template_path, l.code, vocabulary);
    auto gold = load_gold(l.gold_path, part);
    parts.push_back(part.with_gold(std::move(gold)));
  }
  return merge_corpora(parts);
}

}  // namespace persuasion
