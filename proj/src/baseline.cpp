#include "persuasion/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

#include "json.hpp"
#include "persuasion/error.hpp"
#include "persuasion/unicode.hpp"

namespace persuasion {

using nlohmann::json;

namespace {

// Truncated UTF-8 text with codepoint byte offsets (size = codepoints + 1).
struct CodepointText {
  std::string bytes;
  std::vector<std::size_t> offsets;
};

CodepointText truncate_codepoints(std::string_view text, std::size_t max_chars) {
  auto cps = unicode::decode_utf8(text);
  if (cps.size() > max_chars) cps.resize(max_chars);
  CodepointText out;
  out.offsets.reserve(cps.size() + 1);
  for (char32_t cp : cps) {
    out.offsets.push_back(out.bytes.size());
    unicode::append_utf8(out.bytes, cp);
  }
  out.offsets.push_back(out.bytes.size());
  return out;
}

template <class Fn>
void for_each_ngram(std::string_view text, const FeaturizerConfig& config, Fn&& fn) {
  const auto t = truncate_codepoints(text, config.max_chars);
  const std::size_t len = t.offsets.size() - 1;
  const std::string_view bytes(t.bytes);
  for (std::size_t n = config.ngram_min; n <= config.ngram_max && n <= len; ++n) {
    for (std::size_t s = 0; s + n <= len; ++s) {
      fn(bytes.substr(t.offsets[s], t.offsets[s + n] - t.offsets[s]));
    }
  }
}

std::vector<std::uint32_t> hashed_indices(std::string_view text, const FeaturizerConfig& config) {
  std::vector<std::uint32_t> out;
  const std::uint64_t mask = config.hash_dim - 1;
  for_each_ngram(text, config, [&](std::string_view gram) {
    out.push_back(static_cast<std::uint32_t>(fnv1a64(gram) & mask));
  });
  std::sort(out.begin(), out.end());
  return out;
}

double idf_weight(std::size_t documents, std::size_t df) {
  return std::log((1.0 + static_cast<double>(documents)) / (1.0 + static_cast<double>(df))) + 1.0;
}

double example_loss(const LinearParams& params, const Example& ex) {
  double total = 0.0;
  for (std::size_t c = 0; c < params.classes; ++c) {
    const double p = sigmoid(params.logit(c, ex.features));
    total -= ex.targets[c] ? std::log(p) : std::log(1.0 - p);
  }
  return total;
}

}  // namespace

void FeaturizerConfig::validate() const {
  if (ngram_min < 1 || ngram_max < ngram_min) {
    throw ConfigError("n-gram range must satisfy 1 <= ngram_min <= ngram_max");
  }
  if (hash_dim < 2 || (hash_dim & (hash_dim - 1)) != 0 || hash_dim > (std::size_t{1} << 31)) {
    throw ConfigError("hash_dim must be a power of two in [2, 2^31]");
  }
  if (max_chars == 0) throw ConfigError("max_chars must be positive");
}

void TrainerConfig::validate() const {
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!std::isfinite(learning_rate) || learning_rate <= 0.0) {
    throw ConfigError("learning rate must be a positive finite number");
  }
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::map<std::string, std::size_t> extract_ngrams(std::string_view text,
                                                  const FeaturizerConfig& config) {
  std::map<std::string, std::size_t> counts;
  for_each_ngram(text, config, [&](std::string_view gram) { ++counts[std::string(gram)]; });
  return counts;
}

IdfTable::IdfTable(std::size_t documents, std::unordered_map<std::uint32_t, double> weights)
    : documents_(documents), unseen_weight_(idf_weight(documents, 0)), weights_(std::move(weights)) {}

IdfTable IdfTable::fit(std::span<const std::string> texts, const FeaturizerConfig& config) {
  config.validate();
  std::unordered_map<std::uint32_t, std::size_t> df;
  for (const auto& text : texts) {
    auto indices = hashed_indices(text, config);
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    for (auto j : indices) ++df[j];
  }
  std::unordered_map<std::uint32_t, double> weights;
  weights.reserve(df.size());
  for (const auto& [j, count] : df) weights.emplace(j, idf_weight(texts.size(), count));
  return IdfTable(texts.size(), std::move(weights));
}

double IdfTable::weight(std::uint32_t j) const {
  const auto it = weights_.find(j);
  return it == weights_.end() ? unseen_weight_ : it->second;
}

SparseVector featurize(std::string_view text, const FeaturizerConfig& config, const IdfTable& idf) {
  const auto indices = hashed_indices(text, config);
  SparseVector v;
  for (std::size_t i = 0; i < indices.size();) {
    std::size_t k = i;
    while (k < indices.size() && indices[k] == indices[i]) ++k;
    v.indices.push_back(indices[i]);
    v.values.push_back(static_cast<double>(k - i) * idf.weight(indices[i]));
    i = k;
  }
  double norm = 0.0;
  for (double x : v.values) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& x : v.values) x /= norm;
  }
  return v;
}

double LinearParams::logit(std::size_t c, const SparseVector& x) const {
  const double* row = weights.data() + c * dim;
  double z = bias[c];
  for (std::size_t k = 0; k < x.indices.size(); ++k) z += row[x.indices[k]] * x.values[k];
  return z;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double bce_loss(const LinearParams& params, std::span<const Example> examples) {
  if (examples.empty() || params.classes == 0) return 0.0;
  double total = 0.0;
  for (const auto& ex : examples) total += example_loss(params, ex);
  return total / static_cast<double>(examples.size() * params.classes);
}

namespace {

void accumulate_gradient(const LinearParams& params, const Example& ex, double scale, Gradient& g) {
  for (std::size_t c = 0; c < params.classes; ++c) {
    const double residual = (sigmoid(params.logit(c, ex.features)) - ex.targets[c]) * scale;
    g.bias[c] += residual;
    for (std::size_t k = 0; k < ex.features.nnz(); ++k) {
      g.weights.push_back({static_cast<std::uint32_t>(c), ex.features.indices[k],
                           residual * ex.features.values[k]});
    }
  }
}

}  // namespace

Gradient bce_gradient(const LinearParams& params, std::span<const Example> batch) {
  Gradient g;
  g.bias.assign(params.classes, 0.0);
  if (batch.empty()) return g;
  const double scale = 1.0 / static_cast<double>(batch.size() * params.classes);
  for (const auto& ex : batch) accumulate_gradient(params, ex, scale, g);
  return g;
}

void apply_gradient(LinearParams& params, const Gradient& gradient, double learning_rate) {
  for (std::size_t c = 0; c < params.classes; ++c) params.bias[c] -= learning_rate * gradient.bias[c];
  for (const auto& e : gradient.weights) params.w(e.cls, e.index) -= learning_rate * e.value;
}

BaselineModel train(const Corpus& corpus, const FeaturizerConfig& featurizer,
                    const PreprocessConfig& preprocess_config, const TrainerConfig& trainer,
                    const EpochCallback& on_epoch) {
  featurizer.validate();
  trainer.validate();
  if (corpus.empty()) throw DataError("cannot train on an empty corpus");
  if (!corpus.has_gold()) throw DataError("training corpus has no gold labels");

  const auto& vocabulary = corpus.vocabulary();
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const auto& p : corpus.paragraphs()) texts.push_back(preprocess(p.text, preprocess_config));

  BaselineModel model;
  model.vocabulary = vocabulary;
  model.featurizer = featurizer;
  model.preprocess = preprocess_config;
  model.trainer = trainer;
  model.idf = IdfTable::fit(texts, featurizer);
  model.params = LinearParams(vocabulary.size(), featurizer.hash_dim);

  std::vector<Example> examples;
  examples.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    Example ex{featurize(texts[i], featurizer, model.idf), std::vector<std::uint8_t>(vocabulary.size(), 0)};
    for (const auto& name : corpus.gold_for(corpus.paragraphs()[i].key)) {
      ex.targets[vocabulary.index_of(name)] = 1;
    }
    examples.push_back(std::move(ex));
  }

  model.initial_loss = bce_loss(model.params, examples);

  std::mt19937_64 rng(trainer.seed);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  Gradient gradient;

  for (std::size_t epoch = 0; epoch < trainer.epochs; ++epoch) {
    // Fisher-Yates with a plain modulo draw keeps the order independent of
    // the standard library's distribution implementation.
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng() % i]);
    }
    for (std::size_t start = 0; start < order.size(); start += trainer.batch_size) {
      const std::size_t end = std::min(order.size(), start + trainer.batch_size);
      // Same arithmetic as bce_gradient over the selected examples.
      gradient.bias.assign(vocabulary.size(), 0.0);
      gradient.weights.clear();
      const double scale = 1.0 / static_cast<double>((end - start) * vocabulary.size());
      for (std::size_t k = start; k < end; ++k) {
        accumulate_gradient(model.params, examples[order[k]], scale, gradient);
      }
      apply_gradient(model.params, gradient, trainer.learning_rate);
    }
    const double loss = bce_loss(model.params, examples);
    model.epoch_losses.push_back(loss);
    if (on_epoch) on_epoch(epoch + 1, loss);
    if (!std::isfinite(loss)) {
      throw DivergenceError("training loss became non-finite at epoch " + std::to_string(epoch + 1) +
                            " (learning rate " + std::to_string(trainer.learning_rate) + ")");
    }
  }
  return model;
}

ProbabilityTable predict_probs(const BaselineModel& model, const Corpus& corpus) {
  if (!(model.vocabulary == corpus.vocabulary())) {
    throw VocabularyMismatch("model and corpus use different technique vocabularies");
  }
  constexpr double kEps = 1e-15;
  std::vector<ProbabilityTable::Row> rows;
  rows.reserve(corpus.size());
  for (const auto& p : corpus.paragraphs()) {
    const auto x = featurize(preprocess(p.text, model.preprocess), model.featurizer, model.idf);
    std::vector<double> probs(model.params.classes);
    for (std::size_t c = 0; c < probs.size(); ++c) {
      probs[c] = std::clamp(sigmoid(model.params.logit(c, x)), kEps, 1.0 - kEps);
    }
    rows.push_back({p.key, p.language, std::move(probs)});
  }
  return ProbabilityTable(model.vocabulary, std::move(rows));
}

void write_model(std::ostream& out, const BaselineModel& model) {
  json j;
  j["format"] = kModelFormat;
  j["vocabulary"] = model.vocabulary.names();
  j["featurizer"] = {{"ngram_min", model.featurizer.ngram_min},
                     {"ngram_max", model.featurizer.ngram_max},
                     {"hash_dim", model.featurizer.hash_dim},
                     {"max_chars", model.featurizer.max_chars}};
  j["preprocess"] = {{"normalize_whitespace_punct", model.preprocess.normalize_whitespace_punct},
                     {"replace_entities", model.preprocess.replace_entities}};
  j["trainer"] = {{"epochs", model.trainer.epochs},
                  {"learning_rate", model.trainer.learning_rate},
                  {"batch_size", model.trainer.batch_size},
                  {"seed", model.trainer.seed}};

  std::vector<std::pair<std::uint32_t, double>> idf(model.idf.weights().begin(), model.idf.weights().end());
  std::sort(idf.begin(), idf.end());
  json idf_indices = json::array(), idf_weights = json::array();
  for (const auto& [index, weight] : idf) {
    idf_indices.push_back(index);
    idf_weights.push_back(weight);
  }
  j["idf"] = {{"documents", model.idf.documents()}, {"indices", idf_indices}, {"weights", idf_weights}};

  j["bias"] = model.params.bias;
  json rows = json::array();
  for (std::size_t c = 0; c < model.params.classes; ++c) {
    json indices = json::array(), values = json::array();
    for (std::size_t k = 0; k < model.params.dim; ++k) {
      const double w = model.params.w(c, k);
      if (w != 0.0) {
        indices.push_back(k);
        values.push_back(w);
      }
    }
    rows.push_back({{"indices", indices}, {"values", values}});
  }
  j["weights"] = rows;
  j["training"] = {{"initial_loss", model.initial_loss}, {"epoch_losses", model.epoch_losses}};
  out << j.dump() << '\n';
}

void save_model(const BaselineModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  write_model(out, model);
  out.flush();
  if (!out) throw DataError("failed writing " + path.string());
}

BaselineModel read_model(std::istream& in, const std::string& source) {
  BaselineModel model;
  try {
    const auto j = json::parse(in);
    if (j.at("format").get<std::string>() != kModelFormat) {
      throw DataError(source + ": unsupported model format '" + j.at("format").get<std::string>() + "'");
    }
    model.vocabulary = TechniqueVocabulary(j.at("vocabulary").get<std::vector<std::string>>());
    const auto& f = j.at("featurizer");
    model.featurizer = {f.at("ngram_min").get<std::size_t>(), f.at("ngram_max").get<std::size_t>(),
                        f.at("hash_dim").get<std::size_t>(), f.at("max_chars").get<std::size_t>()};
    model.featurizer.validate();
    const auto& p = j.at("preprocess");
    model.preprocess = {p.at("normalize_whitespace_punct").get<bool>(), p.at("replace_entities").get<bool>()};
    const auto& t = j.at("trainer");
    model.trainer = {t.at("epochs").get<std::size_t>(), t.at("learning_rate").get<double>(),
                     t.at("batch_size").get<std::size_t>(), t.at("seed").get<std::uint64_t>()};

    const auto& idf = j.at("idf");
    const auto idf_indices = idf.at("indices").get<std::vector<std::uint32_t>>();
    const auto idf_weights = idf.at("weights").get<std::vector<double>>();
    if (idf_indices.size() != idf_weights.size()) throw DataError(source + ": idf arrays differ in length");
    std::unordered_map<std::uint32_t, double> weights;
    for (std::size_t k = 0; k < idf_indices.size(); ++k) weights.emplace(idf_indices[k], idf_weights[k]);
    model.idf = IdfTable(idf.at("documents").get<std::size_t>(), std::move(weights));

    model.params = LinearParams(model.vocabulary.size(), model.featurizer.hash_dim);
    model.params.bias = j.at("bias").get<std::vector<double>>();
    const auto& rows = j.at("weights");
    if (model.params.bias.size() != model.vocabulary.size() || rows.size() != model.vocabulary.size()) {
      throw DataError(source + ": weight shape does not match the vocabulary");
    }
    for (std::size_t c = 0; c < rows.size(); ++c) {
      const auto indices = rows[c].at("indices").get<std::vector<std::size_t>>();
      const auto values = rows[c].at("values").get<std::vector<double>>();
      if (indices.size() != values.size()) throw DataError(source + ": weight arrays differ in length");
      for (std::size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] >= model.params.dim) throw DataError(source + ": weight index out of range");
        model.params.w(c, indices[k]) = values[k];
      }
    }
    const auto& training = j.at("training");
    model.initial_loss = training.at("initial_loss").get<double>();
    model.epoch_losses = training.at("epoch_losses").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw DataError(source + ": malformed model file: " + e.what());
  } catch (const ConfigError& e) {
    throw DataError(source + ": " + e.what());
  }
  return model;
}

BaselineModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model " + path.string());
  return read_model(in, path.string());
}

}  // namespace persuasion
