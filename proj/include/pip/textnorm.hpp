#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pip/model.hpp"

namespace pip {

enum class TokenKind { Word, Url, Emoji, Hashtag, Mention, Punct, Symbol };

struct UrlPlaceholder {
  int id = 0;
  std::string url;
};

struct EmojiExpansion {
  std::u32string codepoints;
  std::string description;
  std::size_t token_index = 0;
};

/// Byte range of a token in the source text.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct NormalizedText {
  std::vector<std::string> tokens;
  std::vector<TokenKind> kinds;
  std::vector<TokenSpan> spans;
  std::vector<UrlPlaceholder> url_map;
  std::vector<EmojiExpansion> emoji_expansions;
  std::vector<std::string> hashtags;
  std::vector<std::string> mentions;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
};

/// Byte ranges of http(s) URLs in `text`, in order of appearance. Trailing
/// sentence punctuation is not part of the URL.
std::vector<TokenSpan> find_urls(std::string_view text);

/// Builds a NormalizedText from pre-split tokens; every token is a Word.
NormalizedText from_tokens(std::vector<std::string> tokens);

/// Frozen code-point-sequence -> description table used to expand emoji.
class EmojiTable {
 public:
  /// Parses `codepoints<TAB>name` lines (hex code points separated by spaces).
  static EmojiTable parse(std::string_view tsv);
  static const EmojiTable& builtin();

  /// Longest table entry that prefixes `text` starting at `pos`;
  /// returns the match length in code points (0 if none).
  std::size_t match(std::u32string_view text, std::size_t pos, std::string* description) const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::map<std::u32string, std::string, std::less<>> entries_;
  std::size_t max_length_ = 0;
};

/// Splits text into tokens: URLs become `url-k` placeholders, emoji become their
/// descriptions, Han/Kana/Thai are segmented per code point, other scripts on
/// whitespace and punctuation. Hashtags and mentions are kept as tokens.
NormalizedText tokenize(std::string_view text, const EmojiTable& emoji = EmojiTable::builtin());

struct LanguageTag {
  Language code = Language::other;
  double confidence = 0.0;
};

/// Character 1-3-gram profile detector over a closed language set.
class LanguageDetector {
 public:
  static constexpr double kDefaultThreshold = 0.5;

  /// Profiles are built by tokenizing each fixture text the same way posts are.
  explicit LanguageDetector(const std::vector<std::pair<Language, std::string>>& fixtures,
                            double threshold = kDefaultThreshold);
  static const LanguageDetector& builtin();

  LanguageTag detect(const NormalizedText& text) const;
  /// Per-language similarity in [0,1], in kKnownLanguages order.
  std::vector<double> similarities(const NormalizedText& text) const;
  double threshold() const noexcept { return threshold_; }

 private:
  std::vector<Language> languages_;
  // n-gram -> relative frequency per language
  std::vector<std::unordered_map<std::string, double>> profiles_;
  // n-gram -> max relative frequency across languages
  std::unordered_map<std::string, double> max_frequency_;
  double threshold_;
};

/// Weighted character n-grams (n = 1..3) of the word content of a text. Exposed
/// for the detector's tests.
std::unordered_map<std::string, double> char_ngrams(const NormalizedText& text);

LanguageTag detect_language(const NormalizedText& text);

struct JargonEntry {
  std::string term;
  std::string gloss;
  Category category = Category::Others;
};

class JargonLexicon {
 public:
  static JargonLexicon parse(std::string_view tsv);
  static const JargonLexicon& builtin();

  /// Fails with InvalidEntity if the term is already present.
  void add(JargonEntry entry);
  const std::vector<JargonEntry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::vector<JargonEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_term_;
};

struct JargonHit {
  std::size_t token_index = 0;
  std::string term;
  Category category = Category::Others;

  friend bool operator==(const JargonHit&, const JargonHit&) = default;
};

/// Reports every lexicon term found as a single token or as a contiguous run of
/// tokens whose concatenation equals the term (CJK terms span several tokens).
std::vector<JargonHit> jargon_tag(const NormalizedText& text, const JargonLexicon& lexicon);

struct HashtagStats {
  double median = 0.0;
  double mean = 0.0;
  double frac_ge3 = 0.0;
  double frac_ge5 = 0.0;
};

/// Fails with EmptyCohort on an empty post list.
HashtagStats hashtag_stats(std::span<const Post> posts);
HashtagStats hashtag_stats(std::span<const std::size_t> counts);

}  // namespace pip
