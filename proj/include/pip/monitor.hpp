#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pip/model.hpp"
#include "pip/source.hpp"
#include "pip/store.hpp"

namespace pip {

inline constexpr int kDefaultCadenceDays = 7;
inline constexpr std::size_t kDefaultCohortSample = 50000;

/// PIPs first posted within one 7-day window.
struct EvasionCohort {
  std::string cohort_id;
  Timestamp window_start = 0;  // inclusive
  Timestamp window_end = 0;    // exclusive
  std::vector<std::string> post_ids;
};

/// Groups PIPs into consecutive 7-day posting windows starting at `origin`
/// (the earliest post when empty), named PIP-1, PIP-2, ... in time order.
/// Windows holding more than `sample` posts are sampled uniformly.
std::vector<EvasionCohort> weekly_cohorts(const std::vector<Post>& pips, std::optional<Timestamp> origin = std::nullopt,
                                          std::size_t sample = kDefaultCohortSample, std::uint64_t seed = 42);

struct RevisitPlan {
  Timestamp first_probe = 0;
  int cadence_days = kDefaultCadenceDays;
  int ticks = 4;
};

struct RevisitResult {
  std::vector<RevisitRecord> records;
  std::vector<std::string> warnings;
};

/// Probes every member at first_probe + k * cadence for k < ticks. A failed
/// probe is skipped with a warning.
RevisitResult schedule_revisits(const EvasionCohort& cohort, AvailabilitySource& source, const RevisitPlan& plan);

/// Reachable share among the cohort's probes on the UTC day of
/// `revisit_date`. Fails with NoProbeData when there are none.
double evasion_rate(const EvasionCohort& cohort, const std::vector<RevisitRecord>& records, Timestamp revisit_date);

/// Shares of the five unavailable statuses (all keys present). Fails with
/// NoUnavailable when every record is reachable or the input is empty.
std::map<AvailabilityStatus, double> unavailability_breakdown(const std::vector<RevisitRecord>& records);

struct EngagementBucket {
  int elapse_days = 0;
  std::size_t count = 0;
  double mean_likes = 0;
  double mean_replies = 0;
  double mean_retweets = 0;
  double mean_quotes = 0;
};

/// Mean engagement by whole days between posting and crawling, for
/// 0 <= t_e <= max_days; empty buckets are omitted.
std::vector<EngagementBucket> engagement_curve(const std::vector<Post>& pips, int max_days);

struct EvasionRow {
  std::string group;
  Timestamp window_start = 0;
  Timestamp window_end = 0;
  std::size_t size = 0;
  std::vector<std::optional<double>> rates;  // one per revisit date
};

/// One row per cohort; a date without probes leaves an empty cell.
std::vector<EvasionRow> evasion_table(const std::vector<EvasionCohort>& cohorts,
                                      const std::vector<RevisitRecord>& records,
                                      const std::vector<Timestamp>& revisit_dates);

struct CdfPoint {
  std::size_t pip_count = 0;
  double accounts_share = 0;  // share of accounts with at most pip_count PIPs
};

struct TopShare {
  std::size_t k = 0;
  double accounts_share = 0;  // k / accounts
  double pips_share = 0;
};

struct CorpusReport {
  std::size_t pips = 0;
  std::size_t posts = 0;  // stored posts, PIP or not
  std::size_t accounts = 0;
  std::map<Category, std::size_t> category_counts;
  std::map<Category, double> category_shares;  // over categorised PIPs, all 11 keys
  std::size_t uncategorised = 0;
  std::map<Language, double> language_shares;  // detected, over PIPs
  std::vector<CdfPoint> account_cdf;
  std::vector<TopShare> top_accounts;
  /// PIP share among labeled stored posts (the scanned sample).
  std::optional<double> scanned_pip_ratio;
  /// Per category, share of contacts by kind.
  std::map<Category, std::map<ContactKind, double>> contact_preference;
  /// Mean PIPs per account, split by whether the account was seen suspended.
  std::optional<double> pips_per_suspended_account;
  std::optional<double> pips_per_surviving_account;

  Json to_json() const;
};

/// Fails with EmptyStore when the store has no PIP.
CorpusReport corpus_report(const Store& store);

struct StreamSnapshot {
  std::string name;
  std::size_t posts = 0;
  std::size_t pips = 0;
  double ratio() const { return posts == 0 ? 0.0 : static_cast<double>(pips) / static_cast<double>(posts); }
};

/// Applies the binary decision to a sample of the stream.
StreamSnapshot scan_stream(const std::string& name, const std::vector<Post>& sample,
                           const std::function<bool(const Post&)>& is_pip);

std::string format_date(Timestamp t);

/// CSV layouts.
std::string categories_csv(const CorpusReport& report);
std::string evasion_csv(const std::vector<EvasionRow>& rows);
std::string stream_csv(const std::vector<StreamSnapshot>& snapshots);
std::string contacts_csv(const CorpusReport& report);
std::string engagement_csv(const std::vector<EngagementBucket>& buckets);
std::string accounts_csv(const CorpusReport& report);

void append_revisits(const std::filesystem::path& log, const std::vector<RevisitRecord>& records);
/// Empty when the log does not exist; ParseError on a malformed line.
std::vector<RevisitRecord> read_revisits(const std::filesystem::path& log);

}  // namespace pip
