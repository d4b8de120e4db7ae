#include "pip/model.hpp"

#include <algorithm>

#include "pip/error.hpp"

namespace pip {

namespace {

std::string squash(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == ' ' || c == '_' || c == '-' || c == '/' || c == '&') continue;
    out.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return out;
}

template <class T>
std::optional<T> optional_field(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

Category category_from_json(const Json& j) {
  auto c = parse_category(j.get<std::string>());
  if (!c) fail(ErrorCode::InvalidEntity, "unknown category " + j.get<std::string>());
  return *c;
}

}  // namespace

std::string_view to_string(Category c) noexcept {
  switch (c) {
    case Category::Pornography: return "Pornography";
    case Category::Gambling: return "Gambling";
    case Category::IllegalDrug: return "IllegalDrug";
    case Category::Surrogacy: return "Surrogacy";
    case Category::Harassment: return "Harassment";
    case Category::MoneyLaundering: return "MoneyLaundering";
    case Category::WeaponSales: return "WeaponSales";
    case Category::DataTheftLeakage: return "DataTheftLeakage";
    case Category::ForgeryFakeDocuments: return "ForgeryFakeDocuments";
    case Category::Crowdturfing: return "Crowdturfing";
    case Category::Others: return "Others";
  }
  return "Others";
}

std::optional<Category> parse_category(std::string_view name) {
  const std::string key = squash(name);
  for (Category c : kAllCategories) {
    if (squash(to_string(c)) == key) return c;
  }
  if (key == "drug" || key == "drugs") return Category::IllegalDrug;
  if (key == "porn" || key == "sex") return Category::Pornography;
  if (key == "dataleakage" || key == "datatheft" || key == "datatheftandleakage")
    return Category::DataTheftLeakage;
  if (key == "weapon" || key == "weapons") return Category::WeaponSales;
  if (key == "forgery" || key == "fakedocuments" || key == "forgeryandfakedocuments")
    return Category::ForgeryFakeDocuments;
  if (key == "other") return Category::Others;
  return std::nullopt;
}

std::string_view to_string(Language l) noexcept {
  switch (l) {
    case Language::zh: return "zh";
    case Language::en: return "en";
    case Language::ja: return "ja";
    case Language::th: return "th";
    case Language::es: return "es";
    case Language::it: return "it";
    case Language::de: return "de";
    case Language::ru: return "ru";
    case Language::ko: return "ko";
    case Language::fr: return "fr";
    case Language::other: return "other";
  }
  return "other";
}

std::optional<Language> parse_language(std::string_view code) {
  for (Language l : kKnownLanguages) {
    if (to_string(l) == code) return l;
  }
  if (code == "other") return Language::other;
  return std::nullopt;
}

std::string_view to_string(ContactKind k) noexcept {
  switch (k) {
    case ContactKind::QQ: return "QQ";
    case ContactKind::WeChat: return "WeChat";
    case ContactKind::Telegram: return "Telegram";
    case ContactKind::WhatsApp: return "WhatsApp";
    case ContactKind::LINE: return "LINE";
    case ContactKind::URL: return "URL";
    case ContactKind::TwitterMention: return "TwitterMention";
    case ContactKind::Other: return "Other";
  }
  return "Other";
}

std::optional<ContactKind> parse_contact_kind(std::string_view name) {
  const std::string key = squash(name);
  for (ContactKind k : kAllContactKinds) {
    if (squash(to_string(k)) == key) return k;
  }
  if (key == "mention" || key == "twitter") return ContactKind::TwitterMention;
  return std::nullopt;
}

std::string_view to_string(ContactSource s) noexcept {
  return s == ContactSource::Post ? "post" : "profile";
}

std::string Post::full_text() const {
  std::string out = text;
  for (const auto& option : poll_options) {
    out += '\n';
    out += option;
  }
  return out;
}

std::string Contact::key() const {
  std::string k(to_string(kind));
  k += '|';
  k += value;
  k += '|';
  k += to_string(source);
  k += '|';
  k += source == ContactSource::Post ? post_id : account_id;
  return k;
}

void to_json(Json& j, const Engagement& e) {
  j = Json{{"likes", e.likes}, {"replies", e.replies}, {"retweets", e.retweets}, {"quotes", e.quotes}};
}

void from_json(const Json& j, Engagement& e) {
  e.likes = j.value("likes", std::int64_t{0});
  e.replies = j.value("replies", std::int64_t{0});
  e.retweets = j.value("retweets", std::int64_t{0});
  e.quotes = j.value("quotes", std::int64_t{0});
}

void to_json(Json& j, const PostLabel& l) {
  j = Json{{"is_pip", l.pip.is_pip},
           {"confidence", l.pip.confidence},
           {"category", l.category ? Json(std::string(to_string(*l.category))) : Json(nullptr)},
           {"labeler", l.labeler},
           {"time", l.time}};
}

void from_json(const Json& j, PostLabel& l) {
  l.pip.is_pip = j.at("is_pip").get<bool>();
  l.pip.confidence = j.value("confidence", l.pip.is_pip ? 1.0 : 0.0);
  l.category.reset();
  if (j.contains("category") && !j.at("category").is_null()) l.category = category_from_json(j.at("category"));
  l.labeler = j.value("labeler", std::string{});
  l.time = j.value("time", Timestamp{0});
}

void to_json(Json& j, const Post& p) {
  j = Json{{"id", p.id},
           {"author_id", p.author_id},
           {"text", p.text},
           {"hashtags", p.hashtags},
           {"mentions", p.mentions},
           {"media_refs", p.media_refs},
           {"poll_options", p.poll_options},
           {"created_at", p.created_at},
           {"crawled_at", p.crawled_at},
           {"engagement", p.engagement},
           {"label", p.label ? Json(*p.label) : Json(nullptr)}};
}

void from_json(const Json& j, Post& p) {
  p.id = j.at("id").get<std::string>();
  p.author_id = j.at("author_id").get<std::string>();
  p.text = j.value("text", std::string{});
  p.hashtags = j.value("hashtags", std::vector<std::string>{});
  p.mentions = j.value("mentions", std::vector<std::string>{});
  p.media_refs = j.value("media_refs", std::vector<std::string>{});
  p.poll_options = j.value("poll_options", std::vector<std::string>{});
  p.created_at = j.value("created_at", Timestamp{0});
  p.crawled_at = j.value("crawled_at", Timestamp{0});
  p.engagement = j.contains("engagement") ? j.at("engagement").get<Engagement>() : Engagement{};
  p.label = optional_field<PostLabel>(j, "label");
}

void to_json(Json& j, const Account& a) {
  j = Json{{"id", a.id},
           {"handle", a.handle},
           {"profile_text", a.profile_text},
           {"registered_at", a.registered_at},
           {"profile_label", a.profile_label ? Json(*a.profile_label) : Json(nullptr)}};
}

void from_json(const Json& j, Account& a) {
  a.id = j.at("id").get<std::string>();
  a.handle = j.value("handle", a.id);
  a.profile_text = j.value("profile_text", std::string{});
  a.registered_at = j.value("registered_at", Timestamp{0});
  a.profile_label = optional_field<PostLabel>(j, "profile_label");
}

void to_json(Json& j, const Contact& c) {
  j = Json{{"kind", std::string(to_string(c.kind))},
           {"value", c.value},
           {"fqdn", c.fqdn},
           {"source", std::string(to_string(c.source))},
           {"post_id", c.post_id},
           {"account_id", c.account_id}};
}

void from_json(const Json& j, Contact& c) {
  const auto kind = parse_contact_kind(j.at("kind").get<std::string>());
  if (!kind) fail(ErrorCode::InvalidEntity, "unknown contact kind");
  c.kind = *kind;
  c.value = j.at("value").get<std::string>();
  c.fqdn = j.value("fqdn", std::string{});
  c.source = j.value("source", std::string{"post"}) == "profile" ? ContactSource::Profile : ContactSource::Post;
  c.post_id = j.value("post_id", std::string{});
  c.account_id = j.value("account_id", std::string{});
}

void to_json(Json& j, const LabelRecord& l) {
  j = Json{{"target", l.target},
           {"is_pip", l.is_pip},
           {"category", l.category ? Json(std::string(to_string(*l.category))) : Json(nullptr)},
           {"labeler_id", l.labeler_id},
           {"time", l.time},
           {"resolved_conflict", l.resolved_conflict}};
}

void from_json(const Json& j, LabelRecord& l) {
  l.target = j.at("target").get<std::string>();
  l.is_pip = j.at("is_pip").get<bool>();
  l.category.reset();
  if (j.contains("category") && !j.at("category").is_null()) l.category = category_from_json(j.at("category"));
  l.labeler_id = j.at("labeler_id").get<std::string>();
  l.time = j.value("time", Timestamp{0});
  l.resolved_conflict = j.value("resolved_conflict", false);
}

std::string_view to_string(KeywordKind k) noexcept { return k == KeywordKind::Hashtag ? "hashtag" : "account"; }

std::string_view to_string(KeywordState s) noexcept { return s == KeywordState::Active ? "active" : "blocked"; }

std::string Keyword::key() const {
  std::string k(to_string(kind));
  k += ':';
  k += value;
  return k;
}

std::optional<Keyword> parse_keyword(std::string_view text) {
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r' || text.back() == '\t')) text.remove_suffix(1);
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  Keyword k;
  if (text.substr(0, 8) == "hashtag:") {
    k.kind = KeywordKind::Hashtag;
    text.remove_prefix(8);
  } else if (text.substr(0, 8) == "account:") {
    k.kind = KeywordKind::Account;
    text.remove_prefix(8);
  } else if (!text.empty() && text.front() == '#') {
    k.kind = KeywordKind::Hashtag;
    text.remove_prefix(1);
  } else if (!text.empty() && text.front() == '@') {
    k.kind = KeywordKind::Account;
    text.remove_prefix(1);
  } else {
    return std::nullopt;
  }
  if (text.empty()) return std::nullopt;
  k.value = std::string(text);
  return k;
}

std::string_view to_string(AvailabilityStatus s) noexcept {
  switch (s) {
    case AvailabilityStatus::Reachable: return "reachable";
    case AvailabilityStatus::SuspendedAccount: return "suspended_account";
    case AvailabilityStatus::PageNonexistent: return "page_nonexistent";
    case AvailabilityStatus::DeletedByAuthor: return "deleted_by_author";
    case AvailabilityStatus::AccountNonexistent: return "account_nonexistent";
    case AvailabilityStatus::RulesViolation: return "rules_violation";
  }
  return "reachable";
}

std::optional<AvailabilityStatus> parse_status(std::string_view s) {
  for (AvailabilityStatus st : kAllStatuses) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

void to_json(Json& j, const KeywordRoundStats& s) {
  j = Json{{"round_id", s.round_id},
           {"retrieved", s.retrieved},
           {"new_pips", s.new_pips},
           {"rcp", s.rcp ? Json(*s.rcp) : Json(nullptr)}};
}

void from_json(const Json& j, KeywordRoundStats& s) {
  s.round_id = j.at("round_id").get<int>();
  s.retrieved = j.at("retrieved").get<std::size_t>();
  s.new_pips = j.at("new_pips").get<std::size_t>();
  s.rcp = optional_field<double>(j, "rcp");
}

void to_json(Json& j, const Keyword& k) {
  j = Json{{"kind", std::string(to_string(k.kind))},
           {"value", k.value},
           {"state", std::string(to_string(k.state))},
           {"blocked_rounds", k.blocked_rounds},
           {"history", k.history}};
}

void from_json(const Json& j, Keyword& k) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind != "hashtag" && kind != "account") fail(ErrorCode::InvalidEntity, "unknown keyword kind " + kind);
  k.kind = kind == "hashtag" ? KeywordKind::Hashtag : KeywordKind::Account;
  k.value = j.at("value").get<std::string>();
  const auto state = j.value("state", std::string{"active"});
  if (state != "active" && state != "blocked") fail(ErrorCode::InvalidEntity, "unknown keyword state " + state);
  k.state = state == "active" ? KeywordState::Active : KeywordState::Blocked;
  k.blocked_rounds = j.value("blocked_rounds", 0);
  k.history = j.value("history", std::vector<KeywordRoundStats>{});
}

void to_json(Json& j, const RevisitRecord& r) {
  j = Json{{"post_id", r.post_id}, {"probe_time", r.probe_time}, {"status", std::string(to_string(r.status))}};
}

void from_json(const Json& j, RevisitRecord& r) {
  r.post_id = j.at("post_id").get<std::string>();
  r.probe_time = j.at("probe_time").get<Timestamp>();
  const auto status = parse_status(j.at("status").get<std::string>());
  if (!status) fail(ErrorCode::InvalidEntity, "unknown availability status");
  r.status = *status;
}

}  // namespace pip
