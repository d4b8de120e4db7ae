#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "pip/error.hpp"
#include "pip/features.hpp"

using namespace pip;

namespace {

const std::vector<std::vector<std::string>> kThreeDocs = {{"a", "b"}, {"b", "c"}, {"c"}};

std::vector<std::vector<std::string>> random_corpus(std::mt19937& rng, int n_docs, int alphabet) {
  std::vector<std::vector<std::string>> docs;
  for (int d = 0; d < n_docs; ++d) {
    std::vector<std::string> doc;
    const int len = static_cast<int>(rng() % 12);
    for (int t = 0; t < len; ++t) doc.push_back(std::string(1, static_cast<char>('a' + rng() % alphabet)));
    docs.push_back(doc);
  }
  return docs;
}

}  // namespace

TEST_CASE("fit counts document frequency and prunes by min_df") {
  const auto v = Vocabulary::fit(kThreeDocs, 1);
  CHECK(v.terms() == std::vector<std::string>{"a", "b", "c"});
  CHECK(v.document_frequency(*v.index("a")) == 1);
  CHECK(v.document_frequency(*v.index("b")) == 2);
  CHECK(v.document_frequency(*v.index("c")) == 2);
  CHECK(v.n_docs() == 3);

  const auto pruned = Vocabulary::fit(kThreeDocs, 2);
  CHECK(pruned.terms() == std::vector<std::string>{"b", "c"});
  CHECK(*pruned.index("b") == 0);
  CHECK_FALSE(pruned.index("a").has_value());

  CHECK_THROWS_AS(Vocabulary::fit(std::vector<std::vector<std::string>>{}, 1), Error);
}

TEST_CASE("idf and normalized weights on the 3-document fixture") {
  const auto v = Vocabulary::fit(kThreeDocs, 1);
  const double idf_a = 1.6931471805599454;  // ln(4/2) + 1
  const double idf_b = 1.2876820724517808;  // ln(4/3) + 1
  CHECK(std::abs(v.idf(*v.index("a")) - idf_a) < 1e-12);
  CHECK(std::abs(v.idf(*v.index("b")) - idf_b) < 1e-12);

  const auto x = v.transform(std::vector<std::string>{"a", "a", "b"});
  REQUIRE(x.entries.size() == 2);
  const double norm = std::sqrt(4 * idf_a * idf_a + idf_b * idf_b);
  CHECK(x.entries[0].first == *v.index("a"));
  CHECK(std::abs(x.entries[0].second - 2 * idf_a / norm) < 1e-9);
  CHECK(std::abs(x.entries[1].second - idf_b / norm) < 1e-9);
  CHECK(std::abs(x.norm() - 1.0) < 1e-9);

  CHECK(v.transform(std::vector<std::string>{"zzz"}).empty());
  CHECK(v.transform(std::vector<std::string>{}).empty());
  CHECK(v.transform(std::vector<std::string>{}).dim == 3);
}

TEST_CASE("idf on a 100-document fixture matches an independent count") {
  std::mt19937 rng(3);
  const auto docs = random_corpus(rng, 100, 6);
  const auto v = Vocabulary::fit(docs, 1);
  for (const auto& term : v.terms()) {
    int df = 0;
    for (const auto& doc : docs) {
      for (const auto& t : doc) {
        if (t == term) {
          ++df;
          break;
        }
      }
    }
    const double expected = std::log(101.0 / (1.0 + df)) + 1.0;
    CHECK(std::abs(v.idf(*v.index(term)) - expected) < 1e-12);
  }
}

TEST_CASE("transform is order invariant and normalized") {
  std::mt19937 rng(17);
  const auto docs = random_corpus(rng, 60, 10);
  const auto v = Vocabulary::fit(docs, 2);
  for (int trial = 0; trial < 300; ++trial) {
    auto doc = random_corpus(rng, 1, 14)[0];
    const auto x = v.transform(doc);
    std::shuffle(doc.begin(), doc.end(), rng);
    CHECK(v.transform(doc) == x);
    const double n = x.norm();
    CHECK((n == 0.0 || std::abs(n - 1.0) < 1e-9));
    for (std::size_t i = 1; i < x.entries.size(); ++i) CHECK(x.entries[i - 1].first < x.entries[i].first);
  }
}

TEST_CASE("fit is deterministic and serializes") {
  std::mt19937 rng(5);
  const auto docs = random_corpus(rng, 40, 8);
  const auto a = Vocabulary::fit(docs, 2);
  const auto b = Vocabulary::fit(docs, 2);
  CHECK(a == b);
  CHECK(a.hash() == b.hash());
  const auto back = Vocabulary::from_json(a.to_json());
  CHECK(back == a);

  auto broken = a.to_json();
  broken["terms"][0]["df"] = 0;
  CHECK_THROWS_AS(Vocabulary::from_json(broken), Error);
}

TEST_CASE("feature_terms adds CJK bigrams and collapses URLs") {
  const auto terms = feature_terms(tokenize("加微信 Hello https://t.me/x"));
  CHECK(terms == std::vector<std::string>{"加", "微", "信", "hello", "url-x", "加微", "微信"});
  const auto separated = feature_terms(tokenize("加 微"));
  CHECK(separated == std::vector<std::string>{"加", "微"});
}
