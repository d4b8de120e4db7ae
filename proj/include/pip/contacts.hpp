#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pip/model.hpp"
#include "pip/textnorm.hpp"

namespace pip {

/// Host of an http(s) URL, lowercased, without port or
/// userinfo. Empty when the URL does not parse.
std::string url_fqdn(std::string_view url);
/// Lowercases scheme and host; path and query are kept verbatim.
std::string canonical_url(std::string_view url);

/// Every http(s) URL in the text, in order, duplicates kept.
std::vector<Contact> extract_urls(std::string_view text);

struct FetchResult {
  int status = 0;
  std::string location;  // redirect target for 3xx
};

/// One HTTP visit without following redirects. Implementations throw
/// Error(FetchFailed) when the URL cannot be fetched.
class Fetcher {
 public:
  virtual ~Fetcher() = default;
  virtual FetchResult fetch(const std::string& url) = 0;
};

inline constexpr int kMaxRedirectHops = 10;

bool is_shortener(std::string_view url);

/// Follows redirects from a shortened URL to its landing page. Other URLs are
/// returned unchanged without a visit. Fails with RedirectLoop on a cycle or
/// when more than max_hops redirects are needed, FetchFailed on a non-redirect
/// error status.
std::string resolve_shortened(const std::string& url, Fetcher& fetcher, int max_hops = kMaxRedirectHops);

struct ImUrl {
  ContactKind kind = ContactKind::Other;
  std::string id;                 // empty when needs_resolution
  bool needs_resolution = false;  // lin.ee / wa.link short links
};

/// Matches t.me/{id}, wa.me/{phone}, line.me/ti/p/{id} and the lin.ee and
/// wa.link shorteners.
std::optional<ImUrl> classify_im_url(std::string_view url);

enum class BioTag : std::uint8_t { O, B_QQ, I_QQ, B_WeChat, I_WeChat, B_Telegram, I_Telegram, B_Other, I_Other };
inline constexpr std::size_t kBioTagCount = 9;
std::string_view to_string(BioTag t) noexcept;
std::optional<BioTag> parse_bio_tag(std::string_view s);
/// Entity kind of a B/I tag (QQ, WeChat, Telegram or Other); nullopt for O.
std::optional<ContactKind> bio_kind(BioTag t) noexcept;
BioTag begin_tag(ContactKind kind);
BioTag inside_tag(ContactKind kind);

bool is_valid_bio(std::span<const BioTag> tags);
/// Rewrites every I-x that follows O or another type as B-x.
void repair_bio(std::vector<BioTag>& tags);

/// Id syntax per platform: QQ 5-12 digits; WeChat and Telegram 4-32 of
/// letters, digits, '_' and '-'; Other 2-64 of the same.
bool valid_contact_id(ContactKind kind, std::string_view id);

struct LabeledSentence {
  NormalizedText text;
  std::vector<BioTag> tags;
};

struct TaggerConfig {
  int epochs = 12;
  std::uint64_t seed = 42;
};

/// Averaged-perceptron tagger decoded greedily left to right.
class TaggerModel {
 public:
  static constexpr int kTemplateVersion = 1;

  TaggerModel() = default;

  /// Fails with DegenerateTrainingSet when no sentence carries a non-O tag.
  static TaggerModel train(const std::vector<LabeledSentence>& labeled, const TaggerConfig& config = {});

  /// Valid BIO sequence with one tag per token. URL, emoji, hashtag, mention
  /// and punctuation tokens are always O.
  std::vector<BioTag> tag(const NormalizedText& text) const;

  bool trained() const noexcept { return !weights_.empty(); }
  std::size_t feature_count() const noexcept { return weights_.size(); }

  Json to_json() const;
  static TaggerModel from_json(const Json& j);

 private:
  using Scores = std::array<double, kBioTagCount>;
  std::unordered_map<std::string, Scores> weights_;
};

inline TaggerModel train_tagger(const std::vector<LabeledSentence>& labeled, const TaggerConfig& config = {}) {
  return TaggerModel::train(labeled, config);
}

/// Contact spans as (kind, first token, one past last token).
struct BioSpan {
  ContactKind kind = ContactKind::Other;
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const BioSpan&, const BioSpan&) = default;
};
std::vector<BioSpan> bio_spans(std::span<const BioTag> tags);

struct SpanPrf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t correct = 0;
};
/// Exact-span micro scores over all entity kinds.
SpanPrf span_prf(const std::vector<std::vector<BioTag>>& gold, const std::vector<std::vector<BioTag>>& predicted);

struct ContactExtraction {
  std::vector<Contact> contacts;
  std::vector<std::string> warnings;
};

/// URLs (IM URLs become IM contacts, shortened links are resolved first),
/// tagged inline ids and @-mentions, deduplicated on (kind, value). Fetch
/// failures become warnings; the URL is then kept as a plain URL contact.
ContactExtraction extract_contacts(const Post& post, const TaggerModel& tagger, Fetcher& fetcher);
ContactExtraction extract_contacts(const Account& account, const TaggerModel& tagger, Fetcher& fetcher);

struct ThreatReport {
  bool reported = false;
  bool alarmed = false;
  bool malware = false;
  bool phishing = false;

  friend bool operator==(const ThreatReport&, const ThreatReport&) = default;
};

class IntelClient {
 public:
  virtual ~IntelClient() = default;
  /// Throws Error when the service cannot answer.
  virtual ThreatReport report(const std::string& url) = 0;
};

struct ThreatEnrichment {
  Contact contact;
  ThreatReport report;
  std::string warning;
};

/// One report per URL contact; client failures give reported=false and a warning.
std::vector<ThreatEnrichment> enrich_threat(const std::vector<Contact>& contacts, IntelClient& intel);
/// Share of enriched URLs with an alarm; 0 for an empty batch.
double alarm_rate(const std::vector<ThreatEnrichment>& enriched);

void to_json(Json& j, const ThreatReport& r);
void from_json(const Json& j, ThreatReport& r);

}  // namespace pip
