#include "pip/textnorm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_set>

#include "pip/error.hpp"
#include "pip/resources_data.hpp"
#include "pip/utf8.hpp"
#include "tsv.hpp"

namespace pip {

using utf8::Script;
using tsv::split_lines;
using tsv::split_tabs;

namespace {

bool ascii_word(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

bool url_stop(unsigned char c) {
  return c <= 0x20 || c >= 0x80 || c == '"' || c == '<' || c == '>' || c == '`' || c == '{' ||
         c == '}' || c == '|' || c == '\\' || c == '^';
}

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (s.size() - pos < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char c = s[pos + i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != prefix[i]) return false;
  }
  return true;
}

bool is_word_script(Script s) {
  return s == Script::Latin || s == Script::Cyrillic || s == Script::Greek || s == Script::Hangul ||
         s == Script::OtherLetter || s == Script::Digit || s == Script::Mark;
}

bool is_tag_char(char32_t cp) {
  const Script s = utf8::classify(cp);
  return cp == '_' || (utf8::is_letter(s) || s == Script::Digit);
}

bool is_mention_char(char32_t cp) {
  const Script s = utf8::classify(cp);
  return cp == '_' || s == Script::Latin || s == Script::Digit;
}

bool is_emoji_modifier(char32_t cp) {
  return cp == 0xFE0F || cp == 0xFE0E || (cp >= 0x1F3FB && cp <= 0x1F3FF);
}

struct Decoded {
  std::u32string cps;
  std::vector<std::size_t> offsets;  // byte offset of each code point, plus end
};

Decoded decode_with_offsets(std::string_view text) {
  Decoded d;
  std::size_t pos = 0;
  while (pos < text.size()) {
    d.offsets.push_back(pos);
    d.cps.push_back(utf8::next(text, pos));
  }
  d.offsets.push_back(text.size());
  return d;
}

}  // namespace

std::vector<TokenSpan> find_urls(std::string_view text) {
  std::vector<TokenSpan> spans;
  std::size_t i = 0;
  while (i < text.size()) {
    const bool boundary = i == 0 || !ascii_word(text[i - 1]);
    std::size_t scheme = 0;
    if (boundary) {
      if (starts_with_ci(text, i, "https://")) scheme = 8;
      else if (starts_with_ci(text, i, "http://")) scheme = 7;
    }
    if (scheme == 0) {
      ++i;
      continue;
    }
    std::size_t end = i + scheme;
    while (end < text.size() && !url_stop(static_cast<unsigned char>(text[end]))) ++end;
    while (end > i + scheme) {
      const char last = text[end - 1];
      if (last == '.' || last == ',' || last == ';' || last == ':' || last == '!' || last == '?' ||
          last == ')' || last == ']' || last == '\'' ) {
        --end;
      } else {
        break;
      }
    }
    if (end == i + scheme) {
      i += scheme;
      continue;
    }
    spans.push_back({i, end});
    i = end;
  }
  return spans;
}

NormalizedText from_tokens(std::vector<std::string> tokens) {
  NormalizedText out;
  out.kinds.assign(tokens.size(), TokenKind::Word);
  out.spans.assign(tokens.size(), TokenSpan{});
  out.tokens = std::move(tokens);
  return out;
}

EmojiTable EmojiTable::parse(std::string_view tsv) {
  EmojiTable table;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(tsv)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[1].empty()) throw ParseError(line_no, "expected codepoints<TAB>name");
    std::u32string seq;
    std::string_view hex = fields[0];
    while (!hex.empty()) {
      const std::size_t space = hex.find(' ');
      const std::string_view part = hex.substr(0, space);
      unsigned value = 0;
      const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value, 16);
      if (ec != std::errc{} || ptr != part.data() + part.size()) throw ParseError(line_no, "bad code point");
      seq.push_back(static_cast<char32_t>(value));
      if (space == std::string_view::npos) break;
      hex.remove_prefix(space + 1);
    }
    table.max_length_ = std::max(table.max_length_, seq.size());
    table.entries_.emplace(std::move(seq), std::string(fields[1]));
  }
  return table;
}

const EmojiTable& EmojiTable::builtin() {
  static const EmojiTable table = parse(resources::emoji_tsv);
  return table;
}

std::size_t EmojiTable::match(std::u32string_view text, std::size_t pos, std::string* description) const {
  const std::size_t longest = std::min(max_length_, text.size() - pos);
  for (std::size_t len = longest; len > 0; --len) {
    const auto it = entries_.find(text.substr(pos, len));
    if (it != entries_.end()) {
      if (description) *description = it->second;
      return len;
    }
  }
  return 0;
}

NormalizedText tokenize(std::string_view text, const EmojiTable& emoji) {
  NormalizedText out;
  const Decoded d = decode_with_offsets(text);
  const std::vector<TokenSpan> urls = find_urls(text);
  std::size_t next_url = 0;

  auto emit = [&](std::string token, TokenKind kind, std::size_t begin, std::size_t end) {
    out.tokens.push_back(std::move(token));
    out.kinds.push_back(kind);
    out.spans.push_back({begin, end});
  };
  auto bytes = [&](std::size_t from, std::size_t to) {
    return std::string(text.substr(d.offsets[from], d.offsets[to] - d.offsets[from]));
  };

  const std::size_t n = d.cps.size();
  std::size_t i = 0;
  while (i < n) {
    const std::size_t byte = d.offsets[i];
    if (next_url < urls.size() && urls[next_url].begin == byte) {
      const TokenSpan span = urls[next_url++];
      const int id = static_cast<int>(out.url_map.size()) + 1;
      out.url_map.push_back({id, std::string(text.substr(span.begin, span.end - span.begin))});
      emit("url-" + std::to_string(id), TokenKind::Url, span.begin, span.end);
      while (i < n && d.offsets[i] < span.end) ++i;
      continue;
    }

    const char32_t cp = d.cps[i];
    const Script script = utf8::classify(cp);
    if (script == Script::Space) {
      ++i;
      continue;
    }

    std::string description;
    if (script == Script::Symbol || script == Script::Punct) {
      std::size_t len = emoji.match(d.cps, i, &description);
      if (len > 0) {
        while (i + len < n && is_emoji_modifier(d.cps[i + len])) ++len;
        out.emoji_expansions.push_back({d.cps.substr(i, len), description, out.tokens.size()});
        emit(description, TokenKind::Emoji, byte, d.offsets[i + len]);
        i += len;
        continue;
      }
    }

    const bool after_word = i > 0 && d.cps[i - 1] < 0x80 && ascii_word(static_cast<char>(d.cps[i - 1]));
    if ((cp == '#' || cp == 0xFF03) && !after_word && i + 1 < n && is_tag_char(d.cps[i + 1])) {
      std::size_t j = i + 1;
      while (j < n && is_tag_char(d.cps[j])) ++j;
      out.hashtags.push_back(bytes(i + 1, j));
      emit(bytes(i, j), TokenKind::Hashtag, byte, d.offsets[j]);
      i = j;
      continue;
    }
    if ((cp == '@' || cp == 0xFF20) && !after_word && i + 1 < n && is_mention_char(d.cps[i + 1])) {
      std::size_t j = i + 1;
      while (j < n && is_mention_char(d.cps[j])) ++j;
      out.mentions.push_back(bytes(i + 1, j));
      emit(bytes(i, j), TokenKind::Mention, byte, d.offsets[j]);
      i = j;
      continue;
    }

    if (utf8::is_segmented_script(script)) {
      emit(bytes(i, i + 1), TokenKind::Word, byte, d.offsets[i + 1]);
      ++i;
      continue;
    }

    if ((is_word_script(script) && script != Script::Mark) || cp == '_') {
      std::size_t j = i + 1;
      while (j < n) {
        const char32_t c = d.cps[j];
        const Script s = utf8::classify(c);
        if ((is_word_script(s) || c == '_') && !utf8::is_segmented_script(s)) {
          ++j;
        } else if (c == '-' && j + 1 < n && is_word_script(utf8::classify(d.cps[j + 1])) &&
                   utf8::classify(d.cps[j + 1]) != Script::Mark) {
          j += 2;
        } else {
          break;
        }
      }
      emit(bytes(i, j), TokenKind::Word, byte, d.offsets[j]);
      i = j;
      continue;
    }

    if (script == Script::Mark && !out.tokens.empty() && out.spans.back().end == byte &&
        out.kinds.back() != TokenKind::Url && out.kinds.back() != TokenKind::Emoji) {
      out.tokens.back() += bytes(i, i + 1);
      out.spans.back().end = d.offsets[i + 1];
      ++i;
      continue;
    }

    emit(bytes(i, i + 1), script == Script::Punct ? TokenKind::Punct : TokenKind::Symbol, byte,
         d.offsets[i + 1]);
    ++i;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Language identification

std::unordered_map<std::string, double> char_ngrams(const NormalizedText& text) {
  std::vector<std::u32string> chunks;
  bool previous_segmented = false;
  for (std::size_t i = 0; i < text.tokens.size(); ++i) {
    const TokenKind kind = text.kinds[i];
    if (kind != TokenKind::Word && kind != TokenKind::Hashtag) {
      previous_segmented = false;
      continue;
    }
    std::string_view token = text.tokens[i];
    if (kind == TokenKind::Hashtag) token.remove_prefix(1);
    std::u32string cps = utf8::decode(utf8::lower(token));
    std::erase_if(cps, [](char32_t c) {
      const Script s = utf8::classify(c);
      return s == Script::Digit || c == '_' || c == '-';
    });
    if (cps.empty()) {
      previous_segmented = false;
      continue;
    }
    const bool segmented = cps.size() == 1 && utf8::is_segmented_script(utf8::classify(cps[0]));
    if (segmented && previous_segmented && !chunks.empty()) {
      chunks.back() += cps;
    } else {
      chunks.push_back(std::move(cps));
    }
    previous_segmented = segmented;
  }

  std::unordered_map<std::string, double> grams;
  for (const auto& chunk : chunks) {
    const std::u32string padded = U" " + chunk + U" ";
    for (std::size_t n = 1; n <= 3; ++n) {
      if (padded.size() < n) break;
      for (std::size_t i = 0; i + n <= padded.size(); ++i) {
        const std::u32string_view gram = std::u32string_view(padded).substr(i, n);
        if (gram.find_first_not_of(U' ') == std::u32string_view::npos) continue;
        grams[utf8::encode(gram)] += static_cast<double>(n * n);
      }
    }
  }
  return grams;
}

LanguageDetector::LanguageDetector(const std::vector<std::pair<Language, std::string>>& fixtures,
                                   double threshold)
    : threshold_(threshold) {
  for (const auto& [language, text] : fixtures) {
    auto it = std::find(languages_.begin(), languages_.end(), language);
    std::size_t slot = 0;
    if (it == languages_.end()) {
      languages_.push_back(language);
      profiles_.emplace_back();
      slot = languages_.size() - 1;
    } else {
      slot = static_cast<std::size_t>(it - languages_.begin());
    }
    for (std::string_view line : split_lines(text)) {
      for (const auto& [gram, weight] : char_ngrams(tokenize(line))) profiles_[slot][gram] += weight;
    }
  }
  for (auto& profile : profiles_) {
    // normalize separately per n-gram order so short and long grams both count
    double totals[4] = {0, 0, 0, 0};
    for (const auto& [gram, weight] : profile) totals[utf8::length(gram)] += weight;
    for (auto& [gram, weight] : profile) {
      weight /= totals[utf8::length(gram)];
      double& best = max_frequency_[gram];
      best = std::max(best, weight);
    }
  }
}

const LanguageDetector& LanguageDetector::builtin() {
  static const LanguageDetector detector({
      {Language::zh, std::string(resources::lang_zh_txt)},
      {Language::en, std::string(resources::lang_en_txt)},
      {Language::ja, std::string(resources::lang_ja_txt)},
      {Language::th, std::string(resources::lang_th_txt)},
      {Language::es, std::string(resources::lang_es_txt)},
      {Language::it, std::string(resources::lang_it_txt)},
      {Language::de, std::string(resources::lang_de_txt)},
      {Language::ru, std::string(resources::lang_ru_txt)},
      {Language::ko, std::string(resources::lang_ko_txt)},
      {Language::fr, std::string(resources::lang_fr_txt)},
  });
  return detector;
}

std::vector<double> LanguageDetector::similarities(const NormalizedText& text) const {
  std::vector<double> result(kKnownLanguages.size(), 0.0);
  const auto grams = char_ngrams(text);
  // Only n-grams seen in some profile carry evidence; the share of characters
  // seen anywhere scales the result so unknown scripts fall below threshold.
  double known_weight = 0.0;
  double chars_total = 0.0;
  double chars_known = 0.0;
  std::vector<std::pair<const std::string*, double>> known;
  for (const auto& [gram, weight] : grams) {
    const bool seen = max_frequency_.contains(gram);
    if (utf8::length(gram) == 1) {
      chars_total += weight;
      if (seen) chars_known += weight;
    }
    if (seen) {
      known_weight += weight;
      known.emplace_back(&gram, weight);
    }
  }
  if (known_weight <= 0.0 || chars_total <= 0.0) return result;
  const double coverage = chars_known / chars_total;
  for (std::size_t slot = 0; slot < languages_.size(); ++slot) {
    double score = 0.0;
    for (const auto& [gram, weight] : known) {
      const auto it = profiles_[slot].find(*gram);
      if (it == profiles_[slot].end()) continue;
      score += weight * (it->second / max_frequency_.at(*gram));
    }
    const auto pos = std::find(kKnownLanguages.begin(), kKnownLanguages.end(), languages_[slot]);
    if (pos != kKnownLanguages.end()) {
      result[static_cast<std::size_t>(pos - kKnownLanguages.begin())] =
          std::clamp(coverage * score / known_weight, 0.0, 1.0);
    }
  }
  return result;
}

LanguageTag LanguageDetector::detect(const NormalizedText& text) const {
  const std::vector<double> sims = similarities(text);
  std::size_t best = 0;
  for (std::size_t i = 1; i < sims.size(); ++i) {
    if (sims[i] > sims[best]) best = i;
  }
  if (sims.empty() || sims[best] < threshold_) return {Language::other, sims.empty() ? 0.0 : sims[best]};
  return {kKnownLanguages[best], sims[best]};
}

LanguageTag detect_language(const NormalizedText& text) { return LanguageDetector::builtin().detect(text); }

// ---------------------------------------------------------------------------
// Jargon

JargonLexicon JargonLexicon::parse(std::string_view tsv) {
  JargonLexicon lexicon;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(tsv)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 3) throw ParseError(line_no, "expected term<TAB>gloss<TAB>category");
    const auto category = parse_category(fields[2]);
    if (!category) throw ParseError(line_no, "unknown category " + std::string(fields[2]));
    lexicon.add({std::string(fields[0]), std::string(fields[1]), *category});
  }
  return lexicon;
}

const JargonLexicon& JargonLexicon::builtin() {
  static const JargonLexicon lexicon = parse(resources::jargon_tsv);
  return lexicon;
}

void JargonLexicon::add(JargonEntry entry) {
  if (entry.term.empty()) fail(ErrorCode::InvalidEntity, "empty jargon term");
  std::string key = utf8::lower(entry.term);
  if (by_term_.contains(key)) fail(ErrorCode::InvalidEntity, "duplicate jargon term " + entry.term);
  by_term_.emplace(std::move(key), entries_.size());
  entries_.push_back(std::move(entry));
}

std::vector<JargonHit> jargon_tag(const NormalizedText& text, const JargonLexicon& lexicon) {
  require(!lexicon.empty(), ErrorCode::PreconditionFailed, "jargon lexicon is empty");
  std::unordered_map<std::string, const JargonEntry*> terms;
  std::size_t longest = 0;
  for (const auto& entry : lexicon.entries()) {
    std::string key = utf8::lower(entry.term);
    longest = std::max(longest, key.size());
    terms.emplace(std::move(key), &entry);
  }
  const bool have_spans = !text.spans.empty() &&
                          std::any_of(text.spans.begin(), text.spans.end(), [](const TokenSpan& s) { return s.end > 0; });

  std::vector<JargonHit> hits;
  for (std::size_t i = 0; i < text.tokens.size(); ++i) {
    std::string joined;
    for (std::size_t j = i; j < text.tokens.size(); ++j) {
      if (j > i && have_spans && text.spans[j].begin != text.spans[j - 1].end) break;
      if (text.kinds[j] == TokenKind::Url || text.kinds[j] == TokenKind::Emoji) break;
      joined += utf8::lower(text.tokens[j]);
      if (joined.size() > longest) break;
      const auto it = terms.find(joined);
      if (it != terms.end()) hits.push_back({i, it->second->term, it->second->category});
    }
  }
  return hits;
}

// ---------------------------------------------------------------------------
// Hashtag statistics

HashtagStats hashtag_stats(std::span<const std::size_t> counts) {
  if (counts.empty()) fail(ErrorCode::EmptyCohort, "hashtag_stats needs at least one post");
  std::vector<std::size_t> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  HashtagStats stats;
  stats.median = n % 2 == 1 ? static_cast<double>(sorted[n / 2])
                            : (static_cast<double>(sorted[n / 2 - 1]) + static_cast<double>(sorted[n / 2])) / 2.0;
  double sum = 0.0;
  std::size_t ge3 = 0;
  std::size_t ge5 = 0;
  for (std::size_t c : sorted) {
    sum += static_cast<double>(c);
    if (c >= 3) ++ge3;
    if (c >= 5) ++ge5;
  }
  stats.mean = sum / static_cast<double>(n);
  stats.frac_ge3 = static_cast<double>(ge3) / static_cast<double>(n);
  stats.frac_ge5 = static_cast<double>(ge5) / static_cast<double>(n);
  return stats;
}

HashtagStats hashtag_stats(std::span<const Post> posts) {
  std::vector<std::size_t> counts;
  counts.reserve(posts.size());
  for (const auto& post : posts) counts.push_back(post.hashtags.size());
  return hashtag_stats(std::span<const std::size_t>(counts));
}

}  // namespace pip
