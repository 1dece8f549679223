#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "persuasion/corpus.hpp"
#include "persuasion/preprocess.hpp"
#include "persuasion/probability_table.hpp"

namespace persuasion {

struct FeaturizerConfig {
  std::size_t ngram_min = 2;
  std::size_t ngram_max = 4;
  std::size_t hash_dim = std::size_t{1} << 18;
  /// Truncation length in codepoints, applied before n-gram extraction.
  std::size_t max_chars = 2000;

  /// Throws ConfigError unless 1 <= ngram_min <= ngram_max, hash_dim is a
  /// power of two below 2^32 and max_chars > 0.
  void validate() const;
  bool operator==(const FeaturizerConfig&) const = default;
};

struct TrainerConfig {
  std::size_t epochs = 20;
  double learning_rate = 0.1;
  std::size_t batch_size = 16;
  std::uint64_t seed = 42;

  void validate() const;
  bool operator==(const TrainerConfig&) const = default;
};

/// Sparse vector with strictly increasing indices.
struct SparseVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const noexcept { return indices.size(); }
  bool operator==(const SparseVector&) const = default;
};

std::uint64_t fnv1a64(std::string_view bytes);

/// Character n-gram counts of the truncated text, keyed by UTF-8 n-gram.
std::map<std::string, std::size_t> extract_ngrams(std::string_view text,
                                                  const FeaturizerConfig& config);

/// Inverse document frequencies over hashed features:
/// idf(j) = ln((1 + N) / (1 + df_j)) + 1.
class IdfTable {
 public:
  IdfTable() = default;
  IdfTable(std::size_t documents, std::unordered_map<std::uint32_t, double> weights);

  static IdfTable fit(std::span<const std::string> texts, const FeaturizerConfig& config);

  std::size_t documents() const noexcept { return documents_; }
  /// Weight for index `j`; features never seen in training use df = 0.
  double weight(std::uint32_t j) const;
  const std::unordered_map<std::uint32_t, double>& weights() const noexcept { return weights_; }

 private:
  std::size_t documents_ = 0;
  double unseen_weight_ = 1.0;
  std::unordered_map<std::uint32_t, double> weights_;
};

/// FNV-1a hashed n-gram counts scaled by idf and L2-normalized (unless zero).
SparseVector featurize(std::string_view text, const FeaturizerConfig& config, const IdfTable& idf);

/// One-vs-rest logistic layer: row-major weights (classes x dim) and biases.
struct LinearParams {
  std::size_t classes = 0;
  std::size_t dim = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  LinearParams() = default;
  LinearParams(std::size_t classes, std::size_t dim)
      : classes(classes), dim(dim), weights(classes * dim, 0.0), bias(classes, 0.0) {}

  double& w(std::size_t c, std::size_t j) { return weights[c * dim + j]; }
  double w(std::size_t c, std::size_t j) const { return weights[c * dim + j]; }

  double logit(std::size_t c, const SparseVector& x) const;
};

double sigmoid(double z);

/// Featurized example with 0/1 targets per class.
struct Example {
  SparseVector features;
  std::vector<std::uint8_t> targets;
};

/// Mean over examples and classes of -[y ln p + (1-y) ln(1-p)], p = sigmoid(logit).
/// Evaluated directly on p, so saturated mistakes give +inf.
double bce_loss(const LinearParams& params, std::span<const Example> examples);

/// Gradient of bce_loss over `batch`: dense bias part plus sparse weight entries
/// (class, index, value); entries may repeat and are meant to be summed.
struct Gradient {
  struct Entry {
    std::uint32_t cls;
    std::uint32_t index;
    double value;
  };
  std::vector<double> bias;
  std::vector<Entry> weights;
};

Gradient bce_gradient(const LinearParams& params, std::span<const Example> batch);
void apply_gradient(LinearParams& params, const Gradient& gradient, double learning_rate);

struct BaselineModel {
  TechniqueVocabulary vocabulary;
  FeaturizerConfig featurizer;
  PreprocessConfig preprocess;
  TrainerConfig trainer;
  IdfTable idf;
  LinearParams params;
  /// Loss of the zero-initialized model on the training data.
  double initial_loss = 0.0;
  /// Full training-set loss after each epoch.
  std::vector<double> epoch_losses;

  double final_loss() const { return epoch_losses.empty() ? initial_loss : epoch_losses.back(); }
};

using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

/// Preprocesses, fits idf, then runs seeded mini-batch gradient descent.
/// Throws DataError on an empty or gold-less corpus and DivergenceError on
/// a non-finite loss.
BaselineModel train(const Corpus& corpus, const FeaturizerConfig& featurizer,
                    const PreprocessConfig& preprocess, const TrainerConfig& trainer,
                    const EpochCallback& on_epoch = {});

/// Probabilities are clamped into [1e-15, 1 - 1e-15] so they stay inside (0,1).
ProbabilityTable predict_probs(const BaselineModel& model, const Corpus& corpus);

inline constexpr std::string_view kModelFormat = "persuasion-baseline/1";

void write_model(std::ostream& out, const BaselineModel& model);
void save_model(const BaselineModel& model, const std::filesystem::path& path);
BaselineModel read_model(std::istream& in, const std::string& source);
BaselineModel load_model(const std::filesystem::path& path);

}  // namespace persuasion
