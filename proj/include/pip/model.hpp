#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace pip {

using Json = nlohmann::json;

/// Unix time in seconds.
using Timestamp = std::int64_t;
inline constexpr Timestamp kSecondsPerDay = 86400;

enum class Category {
  Pornography,
  Gambling,
  IllegalDrug,
  Surrogacy,
  Harassment,
  MoneyLaundering,
  WeaponSales,
  DataTheftLeakage,
  ForgeryFakeDocuments,
  Crowdturfing,
  Others,
};
inline constexpr std::size_t kCategoryCount = 11;
inline constexpr std::array<Category, kCategoryCount> kAllCategories = {
    Category::Pornography,     Category::Gambling,         Category::IllegalDrug,
    Category::Surrogacy,       Category::Harassment,       Category::MoneyLaundering,
    Category::WeaponSales,     Category::DataTheftLeakage, Category::ForgeryFakeDocuments,
    Category::Crowdturfing,    Category::Others,
};

std::string_view to_string(Category c) noexcept;
/// Accepts canonical names as well as the short forms used in jargon glossaries
/// ("Drug", "Data Leakage", "Weapon", ...). Case-insensitive, ignores spaces.
std::optional<Category> parse_category(std::string_view name);

enum class Language { zh, en, ja, th, es, it, de, ru, ko, fr, other };
inline constexpr std::array<Language, 10> kKnownLanguages = {
    Language::zh, Language::en, Language::ja, Language::th, Language::es,
    Language::it, Language::de, Language::ru, Language::ko, Language::fr,
};
std::string_view to_string(Language l) noexcept;
std::optional<Language> parse_language(std::string_view code);

struct Engagement {
  std::int64_t likes = 0;
  std::int64_t replies = 0;
  std::int64_t retweets = 0;
  std::int64_t quotes = 0;

  friend bool operator==(const Engagement&, const Engagement&) = default;
};

struct PipLabel {
  bool is_pip = false;
  double confidence = 0.0;

  friend bool operator==(const PipLabel&, const PipLabel&) = default;
};

/// Label attached to a stored post or profile, either by a classifier or an analyst.
struct PostLabel {
  PipLabel pip;
  std::optional<Category> category;
  std::string labeler;
  Timestamp time = 0;

  friend bool operator==(const PostLabel&, const PostLabel&) = default;
};

struct Post {
  std::string id;
  std::string author_id;
  std::string text;
  std::vector<std::string> hashtags;
  std::vector<std::string> mentions;
  std::vector<std::string> media_refs;
  std::vector<std::string> poll_options;
  Timestamp created_at = 0;
  Timestamp crawled_at = 0;
  Engagement engagement;
  std::optional<PostLabel> label;

  /// Text plus poll options: promotion is sometimes placed only in the poll.
  std::string full_text() const;

  friend bool operator==(const Post&, const Post&) = default;
};

struct Account {
  std::string id;
  std::string handle;
  std::string profile_text;
  Timestamp registered_at = 0;
  std::optional<PostLabel> profile_label;

  friend bool operator==(const Account&, const Account&) = default;
};

enum class ContactKind { QQ, WeChat, Telegram, WhatsApp, LINE, URL, TwitterMention, Other };
inline constexpr std::array<ContactKind, 8> kAllContactKinds = {
    ContactKind::QQ,  ContactKind::WeChat,         ContactKind::Telegram, ContactKind::WhatsApp,
    ContactKind::LINE, ContactKind::URL, ContactKind::TwitterMention, ContactKind::Other,
};
std::string_view to_string(ContactKind k) noexcept;
std::optional<ContactKind> parse_contact_kind(std::string_view name);

enum class ContactSource { Post, Profile };
std::string_view to_string(ContactSource s) noexcept;

struct Contact {
  ContactKind kind = ContactKind::Other;
  std::string value;
  std::string fqdn;  // URL kind only
  ContactSource source = ContactSource::Post;
  std::string post_id;
  std::string account_id;

  /// Store key: one record per (kind, value, provenance).
  std::string key() const;

  friend bool operator==(const Contact&, const Contact&) = default;
};

struct LabelRecord {
  std::string target;
  bool is_pip = false;
  std::optional<Category> category;
  std::string labeler_id;
  Timestamp time = 0;
  bool resolved_conflict = false;

  friend bool operator==(const LabelRecord&, const LabelRecord&) = default;
};

enum class KeywordKind { Hashtag, Account };
enum class KeywordState { Active, Blocked };
std::string_view to_string(KeywordKind k) noexcept;
std::string_view to_string(KeywordState s) noexcept;

struct KeywordRoundStats {
  int round_id = 0;
  std::size_t retrieved = 0;
  std::size_t new_pips = 0;
  /// new_pips / retrieved; absent when nothing was retrieved.
  std::optional<double> rcp;

  friend bool operator==(const KeywordRoundStats&, const KeywordRoundStats&) = default;
};

struct Keyword {
  KeywordKind kind = KeywordKind::Hashtag;
  std::string value;
  KeywordState state = KeywordState::Active;
  /// Consecutive rounds spent blocked (a blocked keyword is never searched).
  int blocked_rounds = 0;
  std::vector<KeywordRoundStats> history;

  /// "hashtag:<value>" or "account:<value>", also the seed-file syntax.
  std::string key() const;
  bool active() const noexcept { return state == KeywordState::Active; }

  friend bool operator==(const Keyword&, const Keyword&) = default;
};

/// Parses "hashtag:<value>" / "account:<value>"; a leading '#' or '@' is also accepted.
std::optional<Keyword> parse_keyword(std::string_view text);

enum class AvailabilityStatus {
  Reachable,
  SuspendedAccount,
  PageNonexistent,
  DeletedByAuthor,
  AccountNonexistent,
  RulesViolation,
};
inline constexpr std::array<AvailabilityStatus, 6> kAllStatuses = {
    AvailabilityStatus::Reachable,       AvailabilityStatus::SuspendedAccount,
    AvailabilityStatus::PageNonexistent, AvailabilityStatus::DeletedByAuthor,
    AvailabilityStatus::AccountNonexistent, AvailabilityStatus::RulesViolation,
};
std::string_view to_string(AvailabilityStatus s) noexcept;
std::optional<AvailabilityStatus> parse_status(std::string_view s);

struct RevisitRecord {
  std::string post_id;
  Timestamp probe_time = 0;
  AvailabilityStatus status = AvailabilityStatus::Reachable;

  friend bool operator==(const RevisitRecord&, const RevisitRecord&) = default;
};

void to_json(Json& j, const Engagement& e);
void from_json(const Json& j, Engagement& e);
void to_json(Json& j, const PostLabel& l);
void from_json(const Json& j, PostLabel& l);
void to_json(Json& j, const Post& p);
void from_json(const Json& j, Post& p);
void to_json(Json& j, const Account& a);
void from_json(const Json& j, Account& a);
void to_json(Json& j, const Contact& c);
void from_json(const Json& j, Contact& c);
void to_json(Json& j, const LabelRecord& l);
void from_json(const Json& j, LabelRecord& l);
void to_json(Json& j, const KeywordRoundStats& s);
void from_json(const Json& j, KeywordRoundStats& s);
void to_json(Json& j, const Keyword& k);
void from_json(const Json& j, Keyword& k);
void to_json(Json& j, const RevisitRecord& r);
void from_json(const Json& j, RevisitRecord& r);

}  // namespace pip
