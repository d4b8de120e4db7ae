#include "pip/pipeline.hpp"

#include <set>

#include "pip/error.hpp"
#include "pip/textnorm.hpp"

namespace pip {

TextClassifier::TextClassifier(Vocabulary vocab, LinearModel binary, std::optional<LinearModel> category)
    : vocab_(std::move(vocab)), binary_(std::move(binary)), category_(std::move(category)) {
  const std::string hash = vocab_.hash();
  if (binary_.dim() != vocab_.size() || (!binary_.vocab_hash.empty() && binary_.vocab_hash != hash)) {
    fail(ErrorCode::VocabularyMismatch, "binary model was trained on another vocabulary");
  }
  if (category_ && (category_->dim() != vocab_.size() ||
                    (!category_->vocab_hash.empty() && category_->vocab_hash != hash))) {
    fail(ErrorCode::VocabularyMismatch, "category model was trained on another vocabulary");
  }
}

TextClassifier TextClassifier::train(const std::vector<LabeledText>& data, const TrainConfig& config,
                                     std::size_t min_df) {
  std::vector<std::vector<std::string>> terms;
  terms.reserve(data.size());
  for (const auto& d : data) terms.push_back(feature_terms(tokenize(d.text)));
  Vocabulary vocab = Vocabulary::fit(terms, min_df);
  const std::string hash = vocab.hash();

  std::vector<BinarySample> binary;
  std::vector<CategorySample> categories;
  std::set<Category> seen;
  for (std::size_t i = 0; i < data.size(); ++i) {
    SparseVector x = vocab.transform(terms[i]);
    if (data[i].is_pip && data[i].category) {
      categories.push_back({x, *data[i].category});
      seen.insert(*data[i].category);
    }
    binary.push_back({std::move(x), data[i].is_pip});
  }
  LinearModel b = train_binary(binary, config);
  b.vocab_hash = hash;
  std::optional<LinearModel> c;
  if (seen.size() >= 2) {
    c = train_multiclass(categories, config);
    c->vocab_hash = hash;
  }
  return TextClassifier(std::move(vocab), std::move(b), std::move(c));
}

SparseVector TextClassifier::vectorize(std::string_view text) const { return vocab_.transform(tokenize(text)); }

PipLabel TextClassifier::classify(std::string_view text) const { return predict_binary(binary_, vectorize(text)); }

std::optional<Category> TextClassifier::categorize(std::string_view text) const {
  if (!category_) return std::nullopt;
  return predict_category(*category_, vectorize(text));
}

Json TextClassifier::to_json() const {
  Json j = {{"vocabulary", vocab_.to_json()}, {"binary", binary_.to_json()}};
  if (category_) j["category"] = category_->to_json();
  return j;
}

TextClassifier TextClassifier::from_json(const Json& j) {
  if (!j.is_object() || !j.contains("vocabulary") || !j.contains("binary")) {
    fail(ErrorCode::ParseError, "classifier file needs vocabulary and binary model");
  }
  std::optional<LinearModel> category;
  if (j.contains("category")) category = LinearModel::from_json(j.at("category"));
  return TextClassifier(Vocabulary::from_json(j.at("vocabulary")), LinearModel::from_json(j.at("binary")),
                        std::move(category));
}

}  // namespace pip
