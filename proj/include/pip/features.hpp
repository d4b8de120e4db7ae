#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pip/model.hpp"
#include "pip/textnorm.hpp"

namespace pip {

using FeatureIndex = std::uint32_t;

/// Index-sorted sparse vector over a vocabulary of dimension `dim`.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::pair<FeatureIndex, double>> entries;

  bool empty() const noexcept { return entries.empty(); }
  double norm() const noexcept;
  double dot(const SparseVector& other) const noexcept;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

/// Terms a document contributes to the bag of words: lowercased tokens, URL
/// placeholders collapsed to `url-x`, plus character bigrams over adjacent
/// Han/Kana/Thai tokens.
std::vector<std::string> feature_terms(const NormalizedText& text);

class Vocabulary {
 public:
  static constexpr int kSchemaVersion = 1;
  static constexpr std::size_t kDefaultMinDf = 2;

  Vocabulary() = default;

  /// Fails with EmptyCorpus on an empty corpus. Terms are indexed in
  /// lexicographic (byte) order.
  static Vocabulary fit(const std::vector<std::vector<std::string>>& docs, std::size_t min_df = kDefaultMinDf);
  static Vocabulary fit(const std::vector<NormalizedText>& corpus, std::size_t min_df = kDefaultMinDf);

  std::size_t size() const noexcept { return terms_.size(); }
  std::size_t n_docs() const noexcept { return n_docs_; }
  std::size_t min_df() const noexcept { return min_df_; }
  const std::vector<std::string>& terms() const noexcept { return terms_; }

  std::optional<FeatureIndex> index(std::string_view term) const;
  std::size_t document_frequency(FeatureIndex i) const { return df_.at(i); }
  /// ln((1 + n_docs) / (1 + df)) + 1
  double idf(FeatureIndex i) const { return idf_.at(i); }

  /// Raw term counts times idf, L2-normalized. OOV terms are dropped.
  SparseVector transform(const std::vector<std::string>& terms) const;
  SparseVector transform(const NormalizedText& text) const;

  /// Stable 64-bit FNV-1a digest of (terms, df, n_docs), hex encoded. Models
  /// record it to detect use with a different vocabulary.
  std::string hash() const;

  Json to_json() const;
  static Vocabulary from_json(const Json& j);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.terms_ == b.terms_ && a.df_ == b.df_ && a.n_docs_ == b.n_docs_ && a.min_df_ == b.min_df_;
  }

 private:
  void rebuild();

  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::vector<double> idf_;
  std::unordered_map<std::string, FeatureIndex> by_term_;
  std::size_t n_docs_ = 0;
  std::size_t min_df_ = 1;
};

}  // namespace pip
