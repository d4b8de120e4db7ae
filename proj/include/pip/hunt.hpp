#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pip/model.hpp"
#include "pip/source.hpp"
#include "pip/store.hpp"

namespace pip {

class TextClassifier;

/// Keywords keyed by "hashtag:<v>" / "account:<v>".
class KeywordSet {
 public:
  KeywordSet() = default;
  explicit KeywordSet(const std::vector<Keyword>& keywords);

  /// False when the (kind, value) pair is already present.
  bool add(Keyword keyword);
  bool contains(const std::string& key) const { return keywords_.count(key) > 0; }
  Keyword* find(const std::string& key);
  const Keyword* find(const std::string& key) const;

  /// Active keywords in key order.
  std::vector<Keyword> active() const;
  std::size_t active_count() const;
  std::size_t size() const noexcept { return keywords_.size(); }
  const std::map<std::string, Keyword>& all() const noexcept { return keywords_; }

  /// Blocks or reactivates by hand (analyst steering).
  void set_state(const std::string& key, KeywordState state);

  static KeywordSet load(const Store& store);
  void save(Store& store) const;

 private:
  std::map<std::string, Keyword> keywords_;
};

/// Lines of `hashtag:<value>` / `account:<value>`; blank lines and lines
/// starting with '#' followed by a space are skipped. Throws ParseError.
std::vector<Keyword> parse_seed_keywords(std::string_view text);
std::vector<Keyword> load_seed_keywords(const std::filesystem::path& path);

struct HuntConfig {
  double rcp_threshold = 0.01;
  std::size_t keyword_budget = 60000;
  std::size_t timeline_limit = kTimelineLimit;
  std::size_t search_limit = 1000;
  std::uint64_t seed = 42;
  std::string labeler = "classifier";

  friend bool operator==(const HuntConfig&, const HuntConfig&) = default;
};

struct RoundReport {
  int round_id = 0;
  std::size_t keywords_used = 0;
  std::size_t posts_scanned = 0;
  std::size_t new_pips = 0;
  std::size_t new_pip_accounts = 0;
  std::vector<std::string> new_keywords;
  std::vector<std::string> blocked_this_round;
  std::vector<std::string> unblocked_this_round;
  /// The source refused further requests; some sampled keywords went unused.
  bool partial = false;
  std::size_t keywords_skipped = 0;

  Json to_json() const;
  static RoundReport from_json(const Json& j);
};

/// Scores a text; the category hook may be empty.
struct HuntClassifier {
  std::function<PipLabel(std::string_view)> binary;
  std::function<std::optional<Category>(std::string_view)> category;

  static HuntClassifier from(const TextClassifier& classifier);
};

/// new_pips / retrieved; nullopt when nothing was retrieved.
std::optional<double> compute_rcp(const KeywordRoundStats& stats);

/// Seeded uniform sample of min(budget, active) active keywords.
std::vector<Keyword> sample_keywords(const KeywordSet& set, std::size_t budget, std::uint64_t seed);

/// Hashtags of every PIP, every PIP author and every account whose profile was
/// classified as PIP; deduplicated, in first-seen order.
std::vector<Keyword> generate_keywords(const std::vector<Post>& new_pips, const std::vector<Account>& pip_accounts);

struct FilterResult {
  std::vector<std::string> blocked;
  std::vector<std::string> unblocked;
};

/// End-of-round state transitions for round `round_id`:
/// - keywords already blocked age by one round;
/// - a blocked keyword aged 4 or more rounds that appears in `generated` is
///   reactivated with its age reset;
/// - an active keyword whose stats for this round have rcp < threshold is
///   blocked; undefined or missing rcp leaves it alone.
FilterResult filter_keywords(KeywordSet& set, double threshold, int round_id,
                             const std::vector<Keyword>& generated = {});

inline constexpr int kUnblockAfterRounds = 4;

/// One crawl round: sample, retrieve, classify, persist new PIPs and PIP
/// accounts, record per-keyword stats, extend the set and filter it. Fails
/// with PreconditionFailed when no keyword is active.
RoundReport run_round(int round_id, KeywordSet& keywords, PostSource& source, const HuntClassifier& classifier,
                      Store& store, const HuntConfig& config = {});

void append_round_report(const std::filesystem::path& log, const RoundReport& report);
std::vector<RoundReport> read_round_reports(const std::filesystem::path& log);

}  // namespace pip
