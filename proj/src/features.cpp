#include "pip/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "pip/error.hpp"
#include "pip/utf8.hpp"

namespace pip {

namespace {

bool is_segmented_token(const NormalizedText& text, std::size_t i) {
  if (text.kinds[i] != TokenKind::Word) return false;
  const auto cps = utf8::decode(text.tokens[i]);
  return cps.size() == 1 && utf8::is_segmented_script(utf8::classify(cps[0]));
}

}  // namespace

double SparseVector::norm() const noexcept {
  double sum = 0.0;
  for (const auto& [i, w] : entries) sum += w * w;
  return std::sqrt(sum);
}

double SparseVector::dot(const SparseVector& other) const noexcept {
  double sum = 0.0;
  auto a = entries.begin();
  auto b = other.entries.begin();
  while (a != entries.end() && b != other.entries.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      sum += a->second * b->second;
      ++a;
      ++b;
    }
  }
  return sum;
}

std::vector<std::string> feature_terms(const NormalizedText& text) {
  std::vector<std::string> terms;
  terms.reserve(text.size() * 2);
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.kinds[i] == TokenKind::Url) {
      terms.emplace_back("url-x");
      continue;
    }
    terms.push_back(utf8::lower(text.tokens[i]));
  }
  for (std::size_t i = 0; i + 1 < text.size(); ++i) {
    if (text.spans[i].end != text.spans[i + 1].begin) continue;
    if (is_segmented_token(text, i) && is_segmented_token(text, i + 1)) {
      terms.push_back(text.tokens[i] + text.tokens[i + 1]);
    }
  }
  return terms;
}

Vocabulary Vocabulary::fit(const std::vector<std::vector<std::string>>& docs, std::size_t min_df) {
  require(!docs.empty(), ErrorCode::EmptyCorpus, "cannot fit a vocabulary on an empty corpus");
  require(min_df >= 1, ErrorCode::PreconditionFailed, "min_df must be at least 1");
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : docs) {
    std::set<std::string_view> seen(doc.begin(), doc.end());
    for (std::string_view term : seen) ++counts[std::string(term)];
  }
  Vocabulary v;
  v.n_docs_ = docs.size();
  v.min_df_ = min_df;
  for (auto& [term, df] : counts) {
    if (df < min_df) continue;
    v.terms_.push_back(term);
    v.df_.push_back(df);
  }
  v.rebuild();
  return v;
}

Vocabulary Vocabulary::fit(const std::vector<NormalizedText>& corpus, std::size_t min_df) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(corpus.size());
  for (const auto& text : corpus) docs.push_back(feature_terms(text));
  return fit(docs, min_df);
}

void Vocabulary::rebuild() {
  by_term_.clear();
  idf_.clear();
  by_term_.reserve(terms_.size());
  idf_.reserve(terms_.size());
  const double n = static_cast<double>(n_docs_);
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    by_term_.emplace(terms_[i], static_cast<FeatureIndex>(i));
    idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(df_[i]))) + 1.0);
  }
}

std::optional<FeatureIndex> Vocabulary::index(std::string_view term) const {
  const auto it = by_term_.find(std::string(term));
  if (it == by_term_.end()) return std::nullopt;
  return it->second;
}

SparseVector Vocabulary::transform(const std::vector<std::string>& terms) const {
  std::map<FeatureIndex, double> tf;
  for (const auto& term : terms) {
    if (const auto i = index(term)) tf[*i] += 1.0;
  }
  SparseVector out;
  out.dim = size();
  out.entries.reserve(tf.size());
  double sum = 0.0;
  for (const auto& [i, count] : tf) {
    const double w = count * idf_[i];
    out.entries.emplace_back(i, w);
    sum += w * w;
  }
  if (sum > 0.0) {
    const double inv = 1.0 / std::sqrt(sum);
    for (auto& entry : out.entries) entry.second *= inv;
  }
  return out;
}

SparseVector Vocabulary::transform(const NormalizedText& text) const { return transform(feature_terms(text)); }

std::string Vocabulary::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::string_view bytes) {
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  };
  mix(std::to_string(n_docs_));
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    mix(terms_[i]);
    mix(std::to_string(df_[i]));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json Vocabulary::to_json() const {
  Json terms = Json::array();
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    terms.push_back(Json{{"term", terms_[i]}, {"index", i}, {"df", df_[i]}});
  }
  return Json{{"schema_version", kSchemaVersion},
              {"n_docs", n_docs_},
              {"min_df", min_df_},
              {"hash", hash()},
              {"terms", std::move(terms)}};
}

Vocabulary Vocabulary::from_json(const Json& j) {
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      fail(ErrorCode::ParseError, "unsupported vocabulary schema version");
    }
    Vocabulary v;
    v.n_docs_ = j.at("n_docs").get<std::size_t>();
    v.min_df_ = j.value("min_df", std::size_t{1});
    const auto& terms = j.at("terms");
    v.terms_.resize(terms.size());
    v.df_.resize(terms.size());
    std::vector<bool> filled(terms.size(), false);
    for (const auto& t : terms) {
      const auto i = t.at("index").get<std::size_t>();
      if (i >= terms.size() || filled[i]) fail(ErrorCode::ParseError, "vocabulary indices are not dense");
      filled[i] = true;
      v.terms_[i] = t.at("term").get<std::string>();
      v.df_[i] = t.at("df").get<std::size_t>();
      if (v.df_[i] == 0 || v.df_[i] > v.n_docs_) fail(ErrorCode::ParseError, "document frequency out of range");
    }
    if (!std::is_sorted(v.terms_.begin(), v.terms_.end()) ||
        std::adjacent_find(v.terms_.begin(), v.terms_.end()) != v.terms_.end()) {
      fail(ErrorCode::ParseError, "vocabulary terms must be unique and sorted");
    }
    v.rebuild();
    if (j.contains("hash") && j.at("hash").get<std::string>() != v.hash()) {
      fail(ErrorCode::ParseError, "vocabulary hash mismatch");
    }
    return v;
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, std::string("vocabulary: ") + e.what());
  }
}

}  // namespace pip
