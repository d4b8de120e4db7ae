#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pip/contacts.hpp"
#include "pip/model.hpp"
#include "pip/source.hpp"

namespace pip::sim {

/// How a campaign writes a contact into its posts.
enum class ContactStyle {
  Inline,    // "加微信 abc123"
  ImUrl,     // https://t.me/abc, https://wa.me/123, https://line.me/ti/p/abc
  ShortUrl,  // lin.ee / wa.link / bit.ly link redirecting to the IM or web page
  Url,       // https://<fqdn>/...
  Mention,   // @handle
};
std::string_view to_string(ContactStyle s) noexcept;
std::optional<ContactStyle> parse_contact_style(std::string_view s);

struct ContactSpec {
  ContactKind kind = ContactKind::WeChat;
  std::string value;  // id, phone number, fqdn or handle
  ContactStyle style = ContactStyle::Inline;
  /// Explicit short link for ShortUrl; generated from the value when empty.
  std::string short_url;

  friend bool operator==(const ContactSpec&, const ContactSpec&) = default;
};

struct CampaignSpec {
  std::string id;
  Category category = Category::Others;
  Language language = Language::en;
  std::size_t n_accounts = 1;
  std::size_t n_posts = 1;
  std::vector<std::string> hashtags;
  std::vector<ContactSpec> contacts;
  std::vector<std::string> jargon;
  double poll_share = 0.05;     // posts whose promotion sits in the poll options
  double profile_share = 0.5;   // accounts whose profile carries the promotion
  bool pool_hashtags = true;    // pad with category and popular tags
  double mention_share = 0.15;  // posts mentioning another account of the campaign

  friend bool operator==(const CampaignSpec&, const CampaignSpec&) = default;
};

struct BenignSpec {
  std::size_t n_posts = 0;
  std::size_t n_accounts = 1;
  std::vector<std::pair<Language, double>> languages = {{Language::en, 1.0}};

  friend bool operator==(const BenignSpec&, const BenignSpec&) = default;
};

struct HashtagCounts {
  double pip_mean = 6.98;
  double benign_mean = 2.27;
  /// Share of benign posts without any hashtag.
  double benign_zero_share = 0.55;

  friend bool operator==(const HashtagCounts&, const HashtagCounts&) = default;
};

inline constexpr double kSuspensionShare = 0.9159;
inline constexpr double kPageNonexistentShare = 0.0622;

/// Per-day probabilities for campaign accounts and posts. Benign content is
/// never taken down.
struct HazardSpec {
  double suspension_per_day = 0.0;  // per account
  double removal_per_day = 0.0;     // per post
  /// Reason drawn when a post is removed; the default splits the non-suspension
  /// share so that page_nonexistent ends up at its observed overall share.
  std::map<AvailabilityStatus, double> removal_mix = default_removal_mix();

  static std::map<AvailabilityStatus, double> default_removal_mix();
  /// Hazards giving `survival` after `days` with the given suspension share of
  /// all takedowns: total rate -ln(survival)/days, split by share.
  static HazardSpec calibrated(double survival, double days, double suspension_share = kSuspensionShare);

  friend bool operator==(const HazardSpec&, const HazardSpec&) = default;
};

struct RedirectSpec {
  std::string from;
  std::string to;

  friend bool operator==(const RedirectSpec&, const RedirectSpec&) = default;
};

struct ThreatSpec {
  std::string url;  // full URL or bare fqdn
  bool malware = false;
  bool phishing = false;

  friend bool operator==(const ThreatSpec&, const ThreatSpec&) = default;
};

struct RateBudget {
  std::size_t requests = 100000;
  double window_seconds = 60.0;

  friend bool operator==(const RateBudget&, const RateBudget&) = default;
};

struct SimCorpusManifest {
  std::uint64_t seed = 1;
  Timestamp epoch = 1666569600;  // 2022-10-24
  int span_days = 7;             // posts are created in [epoch, epoch + span)
  std::vector<CampaignSpec> campaigns;
  BenignSpec benign;
  HashtagCounts hashtag_counts;
  HazardSpec hazard;
  std::vector<RedirectSpec> redirects;
  std::vector<ThreatSpec> threats;
  RateBudget rate_budget;

  /// Throws InvalidManifest.
  void validate() const;
  std::size_t pip_count() const;

  friend bool operator==(const SimCorpusManifest&, const SimCorpusManifest&) = default;
};

void to_json(Json& j, const SimCorpusManifest& m);
void from_json(const Json& j, SimCorpusManifest& m);
/// Parses and validates; malformed JSON or fields raise InvalidManifest.
SimCorpusManifest parse_manifest(std::string_view json_text);
SimCorpusManifest load_manifest(const std::string& path);

/// Manifest whose category and language mix follows the shares measured on
/// the labelled ground truth (about 64% PIPs). Counts are exact integers from
/// largest-remainder rounding.
SimCorpusManifest reference_mix_manifest(std::size_t n_pips, std::size_t n_benign, std::uint64_t seed);
std::vector<std::pair<Category, double>> reference_category_shares();
std::vector<std::pair<Language, double>> reference_language_shares();

/// Splits `total` into integer parts proportional to `weights` (largest remainder,
/// ties to the earlier entry).
std::vector<std::size_t> apportion(std::size_t total, const std::vector<double>& weights);

struct GroundTruth {
  std::string post_id;
  bool is_pip = false;
  std::optional<Category> category;
  std::string campaign_id;  // empty for benign
  Language language = Language::en;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct AccountTruth {
  std::string account_id;
  std::string campaign_id;  // empty for benign
  bool promotes_in_profile = false;

  friend bool operator==(const AccountTruth&, const AccountTruth&) = default;
};

struct SimCorpus {
  std::vector<Post> posts;  // engagement zero; the simulator fills it at serve time
  std::vector<Account> accounts;
  std::vector<GroundTruth> labels;  // parallel to posts
  std::vector<AccountTruth> account_labels;  // parallel to accounts
  std::vector<RedirectSpec> redirects;  // declared plus generated short links
  std::vector<std::string> landing_urls;  // URLs answering 200

  Json to_json() const;
};

SimCorpus generate_corpus(const SimCorpusManifest& manifest);

/// Sliding-window limiter: at most `requests` admissions in any window.
class RateLimiter {
 public:
  using Clock = std::function<double()>;  // seconds

  explicit RateLimiter(RateBudget budget, Clock clock = {});

  /// Throws RateLimitedError with the wait until the oldest admission expires.
  void acquire();
  std::size_t admitted() const;
  const RateBudget& budget() const noexcept { return budget_; }

 private:
  RateBudget budget_;
  Clock clock_;
  mutable std::mutex mutex_;
  std::deque<double> stamps_;
  std::size_t admitted_ = 0;
};

/// In-process OSN over a generated corpus. Corpus state is immutable after
/// construction; only the simulation clock moves, via advance().
class Simulator : public PostSource, public AvailabilitySource, public Fetcher, public IntelClient {
 public:
  explicit Simulator(const SimCorpusManifest& manifest, RateLimiter::Clock clock = {});

  // Rate limited. Posts unavailable at now() are not returned.
  std::vector<Post> search_hashtag(const std::string& tag, std::size_t limit) override;
  std::vector<Post> account_timeline(const std::string& account, std::size_t limit = kTimelineLimit) override;
  std::optional<Account> get_profile(const std::string& account) override;

  /// Unknown ids and times before creation report page_nonexistent.
  AvailabilityStatus check_availability(const std::string& post_id, Timestamp t) override;
  FetchResult fetch(const std::string& url) override;
  ThreatReport report(const std::string& url) override;

  Timestamp now() const;
  /// Moves the clock forward; negative values are rejected.
  void advance(double days);

  const SimCorpus& corpus() const noexcept { return corpus_; }
  const SimCorpusManifest& manifest() const noexcept { return manifest_; }
  const RateLimiter& limiter() const noexcept { return limiter_; }
  /// Time the account gets suspended; max() when never.
  Timestamp suspension_time(const std::string& account_id) const;

 private:
  Post served(std::size_t index, Timestamp now) const;
  AvailabilityStatus status_at(std::size_t index, Timestamp t) const;

  SimCorpusManifest manifest_;
  SimCorpus corpus_;
  RateLimiter limiter_;
  std::unordered_map<std::string, std::size_t> post_index_;
  std::unordered_map<std::string, std::size_t> account_index_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_tag_;     // most recent first
  std::unordered_map<std::string, std::vector<std::size_t>> by_author_;  // most recent first
  std::vector<Timestamp> suspended_at_;  // per account
  std::vector<Timestamp> removed_at_;    // per post
  std::vector<AvailabilityStatus> removal_reason_;
  std::vector<double> like_rate_;        // likes per day
  std::unordered_map<std::string, std::string> redirects_;
  std::unordered_map<std::string, ThreatSpec> threats_;
  std::unordered_map<std::string, bool> landing_;
  mutable std::mutex clock_mutex_;
  Timestamp now_ = 0;
};

}  // namespace pip::sim
