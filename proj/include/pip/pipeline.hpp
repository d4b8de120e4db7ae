#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pip/classify.hpp"
#include "pip/features.hpp"
#include "pip/model.hpp"

namespace pip {

struct LabeledText {
  std::string text;
  bool is_pip = false;
  std::optional<Category> category;  // PIPs only
};

/// Vocabulary plus the binary model and, when trained, the category model.
/// Text goes through tokenize -> feature_terms -> TF-IDF before scoring.
class TextClassifier {
 public:
  TextClassifier() = default;
  TextClassifier(Vocabulary vocab, LinearModel binary, std::optional<LinearModel> category = std::nullopt);

  /// Fits the vocabulary on every text, the binary model on all of them and
  /// the category model on the PIPs that carry a category (skipped when fewer
  /// than two categories are present).
  static TextClassifier train(const std::vector<LabeledText>& data, const TrainConfig& config = {},
                              std::size_t min_df = Vocabulary::kDefaultMinDf);

  SparseVector vectorize(std::string_view text) const;
  PipLabel classify(std::string_view text) const;
  /// nullopt without a category model.
  std::optional<Category> categorize(std::string_view text) const;

  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  const LinearModel& binary() const noexcept { return binary_; }
  const std::optional<LinearModel>& category() const noexcept { return category_; }
  bool has_category_model() const noexcept { return category_.has_value(); }

  /// {"vocabulary", "binary", "category"?}; model vocab hashes are checked on load.
  Json to_json() const;
  static TextClassifier from_json(const Json& j);

 private:
  Vocabulary vocab_;
  LinearModel binary_;
  std::optional<LinearModel> category_;
};

}  // namespace pip
