#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pip/features.hpp"
#include "pip/model.hpp"

namespace pip {

struct TrainConfig {
  double learning_rate = 0.1;
  double l2 = 1e-4;
  int epochs = 50;
  std::uint64_t seed = 42;
  /// Decision threshold on the PIP probability.
  double threshold = 0.5;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

enum class ModelKind { Binary, Multiclass };

/// Logistic linear model. A binary model has one row; a multiclass model has
/// one row per category (one-vs-rest), with rows for categories absent from
/// training marked inactive.
struct LinearModel {
  static constexpr int kSchemaVersion = 1;

  ModelKind kind = ModelKind::Binary;
  Eigen::MatrixXd weights;  // classes x dim
  Eigen::VectorXd bias;
  std::vector<bool> active;
  TrainConfig config;
  std::string vocab_hash;
  int version = 0;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(weights.cols()); }
  /// Per-row w.x + b. Fails with VocabularyMismatch when the vector dimension differs.
  Eigen::VectorXd scores(const SparseVector& x) const;

  Json to_json() const;
  static LinearModel from_json(const Json& j);
};

struct BinarySample {
  SparseVector x;
  bool is_pip = false;
};

struct CategorySample {
  SparseVector x;
  Category category = Category::Others;
};

double sigmoid(double z) noexcept;

/// Fails with DegenerateTrainingSet unless both classes are present.
LinearModel train_binary(const std::vector<BinarySample>& samples, const TrainConfig& config = {});
/// Confidence is sigmoid(w.x + b); is_pip when the confidence exceeds the
/// model's threshold.
PipLabel predict_binary(const LinearModel& model, const SparseVector& x);

/// Fails with DegenerateTrainingSet unless at least two categories are present.
LinearModel train_multiclass(const std::vector<CategorySample>& samples, const TrainConfig& config = {});
/// Argmax over active classes; ties go to the earlier category.
Category predict_category(const LinearModel& model, const SparseVector& x);

struct FoldReport {
  std::size_t test_count = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Binary reports score the positive class (class 1). Multiclass reports give
/// micro averages in precision/recall/f1 and macro averages alongside.
struct EvalReport {
  std::size_t n_classes = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  Eigen::MatrixXd confusion;  // rows true class, columns predicted
  std::vector<FoldReport> folds;

  Json to_json() const;
};

/// Given training features and labels, returns a predictor for one sample.
using Trainer = std::function<std::function<int(const SparseVector&)>(const std::vector<SparseVector>&,
                                                                      const std::vector<int>&)>;

/// Stratified k-fold evaluation. Labels are class ids in [0, n_classes).
/// Fails with TooFewSamples when k exceeds the sample count.
EvalReport cross_validate(const std::vector<SparseVector>& xs, const std::vector<int>& labels,
                          std::size_t n_classes, std::size_t k, const Trainer& trainer, std::uint64_t seed = 42);

EvalReport cross_validate_binary(const std::vector<BinarySample>& samples, std::size_t k,
                                 const TrainConfig& config = {});
EvalReport cross_validate_multiclass(const std::vector<CategorySample>& samples, std::size_t k,
                                     const TrainConfig& config = {});

/// Precision, recall and F1 from a confusion matrix, either for one class or
/// micro/macro averaged.
struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};
Prf class_prf(const Eigen::MatrixXd& confusion, Eigen::Index c);
Prf micro_prf(const Eigen::MatrixXd& confusion);
Prf macro_prf(const Eigen::MatrixXd& confusion);

/// HTTP scorer standing in for a hosted transformer model:
/// POST {base_url}/score {"text": ...} -> {"is_pip", "confidence", "category"}.
struct ExternalScorer {
  std::string base_url;  // e.g. http://127.0.0.1:8090
  double timeout_seconds = 5.0;
};

struct ExternalScore {
  PipLabel label;
  std::optional<Category> category;
};

/// Fails with ScorerUnavailable when the endpoint cannot be reached or answers
/// with a non-2xx status, and ScorerMalformedResponse when the body does not
/// carry a confidence in [0,1].
ExternalScore score_external(const ExternalScorer& scorer, const std::string& text);

}  // namespace pip
