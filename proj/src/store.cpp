#include "pip/store.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "pip/error.hpp"
#include "pip/utf8.hpp"

namespace pip {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kResolvedLabeler = "@resolved";

std::string revisit_key(const RevisitRecord& r) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%020lld", static_cast<long long>(r.probe_time));
  return r.post_id + "|" + buf;
}

std::string label_key(const LabelRecord& l) {
  return l.target + "|" + (l.resolved_conflict ? std::string(kResolvedLabeler) : l.labeler_id);
}

void invalid(const std::string& message) { fail(ErrorCode::InvalidEntity, message); }

bool same_judgement(const LabelRecord& a, const LabelRecord& b) {
  return a.is_pip == b.is_pip && (!a.is_pip || a.category == b.category);
}

template <class T>
std::vector<T> decode_all(const std::map<std::string, Json>& table) {
  std::vector<T> out;
  out.reserve(table.size());
  for (const auto& [_, record] : table) out.push_back(record.template get<T>());
  return out;
}

}  // namespace

std::string_view to_string(Collection c) noexcept {
  switch (c) {
    case Collection::Posts: return "posts";
    case Collection::Accounts: return "accounts";
    case Collection::Contacts: return "contacts";
    case Collection::Keywords: return "keywords";
    case Collection::Labels: return "labels";
    case Collection::Revisits: return "revisits";
    case Collection::Campaigns: return "campaigns";
  }
  return "posts";
}

std::optional<Collection> parse_collection(std::string_view name) {
  for (Collection c : kAllCollections) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

void validate(const Post& p) {
  if (p.id.empty()) invalid("post id is empty");
  if (p.author_id.empty()) invalid("post " + p.id + " has no author");
  if (utf8::length(p.text) > kMaxTextLength) invalid("post " + p.id + " text exceeds the length cap");
  if (p.poll_options.size() > kMaxPollOptions) invalid("post " + p.id + " has more than 4 poll options");
  const Engagement& e = p.engagement;
  if (e.likes < 0 || e.replies < 0 || e.retweets < 0 || e.quotes < 0) invalid("post " + p.id + " has negative engagement");
  if (p.crawled_at != 0 && p.created_at > p.crawled_at) invalid("post " + p.id + " was crawled before it was created");
  if (p.label && !(p.label->pip.confidence >= 0.0 && p.label->pip.confidence <= 1.0)) {
    invalid("post " + p.id + " label confidence outside [0,1]");
  }
}

void validate(const Account& a) {
  if (a.id.empty()) invalid("account id is empty");
  if (utf8::length(a.profile_text) > kMaxTextLength) invalid("account " + a.id + " profile exceeds the length cap");
}

void validate(const Contact& c) {
  if (c.value.empty()) invalid("contact value is empty");
  if (c.kind == ContactKind::URL && c.fqdn.empty()) invalid("URL contact without a host: " + c.value);
  if (c.kind == ContactKind::WhatsApp) {
    for (char ch : c.value) {
      if (ch < '0' || ch > '9') invalid("WhatsApp contact is not a phone number: " + c.value);
    }
  }
}

void validate(const Keyword& k) {
  if (k.value.empty()) invalid("keyword value is empty");
  if (k.blocked_rounds < 0) invalid("keyword " + k.key() + " has negative blocked_rounds");
  for (const auto& h : k.history) {
    if (h.new_pips > h.retrieved) invalid("keyword " + k.key() + " has more new PIPs than retrieved posts");
  }
}

void validate(const LabelRecord& l) {
  if (l.target.empty()) invalid("label target is empty");
  if (l.labeler_id.empty()) invalid("label has no labeler");
  if (l.labeler_id == kResolvedLabeler) invalid("reserved labeler id");
}

void validate(const RevisitRecord& r) {
  if (r.post_id.empty()) invalid("revisit record without a post id");
}

Store::Store() = default;

Store::Store(const fs::path& dir) : dir_(dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create store directory " + dir.string() + ": " + ec.message());
  replay();
  journal_ = std::fopen((dir / "journal.jsonl").c_str(), "ab");
  if (!journal_) fail(ErrorCode::IoError, "cannot open journal in " + dir.string());
}

Store::~Store() {
  if (journal_) std::fclose(journal_);
}

std::map<std::string, Json>& Store::table(Collection c) { return tables_[static_cast<std::size_t>(c)]; }
const std::map<std::string, Json>& Store::table(Collection c) const { return tables_[static_cast<std::size_t>(c)]; }

Json Store::line_for(Collection c, const std::string& key, const Json& record) const {
  return Json{{"schema_version", kSchemaVersion}, {"collection", to_string(c)}, {"key", key}, {"record", record}};
}

Store::Entry Store::decode_line(const std::string& line, std::size_t line_no) {
  const Json j = Json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError(line_no, "not a JSON object");
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) throw ParseError(line_no, "unsupported schema_version");
    const auto c = parse_collection(j.at("collection").get<std::string>());
    if (!c) throw ParseError(line_no, "unknown collection");
    Entry e{*c, j.value("key", std::string{}), j.at("record")};
    // Decoding validates the record shape; the key is derived again from it.
    switch (e.collection) {
      case Collection::Posts: {
        const auto p = e.record.get<Post>();
        validate(p);
        e.key = p.id;
        break;
      }
      case Collection::Accounts: {
        const auto a = e.record.get<Account>();
        validate(a);
        e.key = a.id;
        break;
      }
      case Collection::Contacts: {
        const auto ct = e.record.get<Contact>();
        validate(ct);
        e.key = ct.key();
        break;
      }
      case Collection::Keywords: {
        const auto k = e.record.get<Keyword>();
        validate(k);
        e.key = k.key();
        break;
      }
      case Collection::Labels: {
        const auto l = e.record.get<LabelRecord>();
        if (!l.resolved_conflict) validate(l);
        e.key = label_key(l);
        break;
      }
      case Collection::Revisits: {
        const auto r = e.record.get<RevisitRecord>();
        validate(r);
        e.key = revisit_key(r);
        break;
      }
      case Collection::Campaigns:
        if (e.key.empty()) throw ParseError(line_no, "campaign without a key");
        break;
    }
    return e;
  } catch (const ParseError&) {
    throw;
  } catch (const Json::exception& ex) {
    throw ParseError(line_no, ex.what());
  } catch (const Error& ex) {
    throw ParseError(line_no, ex.what());
  }
}

void Store::replay() {
  const fs::path path = *dir_ / "journal.jsonl";
  if (!fs::exists(path)) return;
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();

  std::size_t start = 0;
  std::size_t line_no = 0;
  std::size_t good_end = 0;
  while (start < content.size()) {
    const std::size_t nl = content.find('\n', start);
    if (nl == std::string::npos) break;  // torn final write
    ++line_no;
    const std::string line = content.substr(start, nl - start);
    if (!line.empty()) {
      const Entry e = decode_line(line, line_no);
      apply(e.collection, e.key, e.record);
    }
    start = nl + 1;
    good_end = start;
  }
  if (good_end < content.size()) fs::resize_file(path, good_end);
}

void Store::apply(Collection c, const std::string& key, const Json& record) { table(c)[key] = record; }

std::string Store::write(Collection c, const std::string& key, const Json& record) {
  auto& t = table(c);
  const auto it = t.find(key);
  if (it != t.end() && it->second == record) return key;
  if (journal_) {
    const std::string line = line_for(c, key, record).dump() + "\n";
    if (std::fwrite(line.data(), 1, line.size(), journal_) != line.size() || std::fflush(journal_) != 0) {
      fail(ErrorCode::IoError, "journal write failed");
    }
  }
  apply(c, key, record);
  return key;
}

std::string Store::put_post(const Post& post) {
  validate(post);
  std::unique_lock lock(mutex_);
  return write(Collection::Posts, post.id, Json(post));
}

std::string Store::put_account(const Account& account) {
  validate(account);
  std::unique_lock lock(mutex_);
  return write(Collection::Accounts, account.id, Json(account));
}

std::string Store::put_contact(const Contact& contact) {
  validate(contact);
  std::unique_lock lock(mutex_);
  return write(Collection::Contacts, contact.key(), Json(contact));
}

std::string Store::put_keyword(const Keyword& keyword) {
  validate(keyword);
  std::unique_lock lock(mutex_);
  return write(Collection::Keywords, keyword.key(), Json(keyword));
}

std::string Store::put_label(const LabelRecord& label) {
  validate(label);
  if (label.resolved_conflict) invalid("resolutions are written through resolve_conflict");
  std::unique_lock lock(mutex_);
  return write(Collection::Labels, label_key(label), Json(label));
}

std::string Store::put_revisit(const RevisitRecord& record) {
  validate(record);
  std::unique_lock lock(mutex_);
  return write(Collection::Revisits, revisit_key(record), Json(record));
}

std::string Store::put_campaign(const std::string& id, const Json& campaign) {
  if (id.empty()) invalid("campaign id is empty");
  std::unique_lock lock(mutex_);
  return write(Collection::Campaigns, id, campaign);
}

bool Store::is_novel(const std::string& post_id) const {
  std::shared_lock lock(mutex_);
  return table(Collection::Posts).count(post_id) == 0;
}

bool Store::insert_if_novel(const Post& post) {
  validate(post);
  std::unique_lock lock(mutex_);
  if (table(Collection::Posts).count(post.id)) return false;
  write(Collection::Posts, post.id, Json(post));
  return true;
}

std::optional<Post> Store::post(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto& t = table(Collection::Posts);
  const auto it = t.find(id);
  if (it == t.end()) return std::nullopt;
  return it->second.get<Post>();
}

std::optional<Account> Store::account(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto& t = table(Collection::Accounts);
  const auto it = t.find(id);
  if (it == t.end()) return std::nullopt;
  return it->second.get<Account>();
}

std::optional<Keyword> Store::keyword(const std::string& key) const {
  std::shared_lock lock(mutex_);
  const auto& t = table(Collection::Keywords);
  const auto it = t.find(key);
  if (it == t.end()) return std::nullopt;
  return it->second.get<Keyword>();
}

std::optional<Json> Store::campaign(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto& t = table(Collection::Campaigns);
  const auto it = t.find(id);
  if (it == t.end()) return std::nullopt;
  return it->second;
}

std::vector<Post> Store::posts() const {
  std::shared_lock lock(mutex_);
  return decode_all<Post>(table(Collection::Posts));
}

std::vector<Account> Store::accounts() const {
  std::shared_lock lock(mutex_);
  return decode_all<Account>(table(Collection::Accounts));
}

std::vector<Contact> Store::contacts() const {
  std::shared_lock lock(mutex_);
  return decode_all<Contact>(table(Collection::Contacts));
}

std::vector<Keyword> Store::keywords() const {
  std::shared_lock lock(mutex_);
  return decode_all<Keyword>(table(Collection::Keywords));
}

std::vector<LabelRecord> Store::labels() const {
  std::shared_lock lock(mutex_);
  return decode_all<LabelRecord>(table(Collection::Labels));
}

std::vector<RevisitRecord> Store::revisits() const {
  std::shared_lock lock(mutex_);
  return decode_all<RevisitRecord>(table(Collection::Revisits));
}

std::vector<std::pair<std::string, Json>> Store::campaigns() const {
  std::shared_lock lock(mutex_);
  const auto& t = table(Collection::Campaigns);
  return {t.begin(), t.end()};
}

std::size_t Store::size(Collection c) const {
  std::shared_lock lock(mutex_);
  return table(c).size();
}

std::size_t Store::pip_count(const std::string& account_id) const {
  std::shared_lock lock(mutex_);
  std::size_t n = 0;
  for (const auto& [_, record] : table(Collection::Posts)) {
    if (record.at("author_id") != account_id) continue;
    const auto& label = record.at("label");
    if (!label.is_null() && label.at("is_pip").get<bool>()) ++n;
  }
  return n;
}

std::vector<LabelRecord> Store::target_labels_locked(const std::string& target) const {
  std::vector<LabelRecord> out;
  const auto& t = table(Collection::Labels);
  const std::string prefix = target + "|";
  for (auto it = t.lower_bound(prefix); it != t.end() && it->first.compare(0, prefix.size(), prefix) == 0; ++it) {
    out.push_back(it->second.get<LabelRecord>());
  }
  return out;
}

std::vector<LabelRecord> Store::labels_for(const std::string& target) const {
  std::shared_lock lock(mutex_);
  auto all = target_labels_locked(target);
  for (const auto& l : all) {
    if (l.resolved_conflict) return {l};
  }
  return all;
}

std::vector<LabelConflict> Store::conflicts() const {
  std::shared_lock lock(mutex_);
  std::map<std::string, std::vector<LabelRecord>> by_target;
  for (const auto& [_, record] : table(Collection::Labels)) {
    auto l = record.get<LabelRecord>();
    by_target[l.target].push_back(std::move(l));
  }
  std::vector<LabelConflict> out;
  for (auto& [target, labels] : by_target) {
    if (std::any_of(labels.begin(), labels.end(), [](const LabelRecord& l) { return l.resolved_conflict; })) continue;
    const bool agree = std::all_of(labels.begin(), labels.end(),
                                   [&](const LabelRecord& l) { return same_judgement(l, labels.front()); });
    if (!agree) out.push_back({target, std::move(labels)});
  }
  return out;
}

LabelRecord Store::resolve_conflict(const std::string& target, bool is_pip, std::optional<Category> category,
                                    const std::string& labeler_id, Timestamp time) {
  std::unique_lock lock(mutex_);
  if (target_labels_locked(target).empty()) fail(ErrorCode::NotFound, "no labels for " + target);
  LabelRecord r;
  r.target = target;
  r.is_pip = is_pip;
  r.category = is_pip ? category : std::nullopt;
  r.labeler_id = labeler_id.empty() ? std::string("resolver") : labeler_id;
  r.time = time;
  r.resolved_conflict = true;
  write(Collection::Labels, label_key(r), Json(r));
  return r;
}

std::optional<LabelRecord> Store::canonical_label(const std::string& target) const {
  const auto labels = labels_for(target);
  if (labels.empty()) return std::nullopt;
  if (labels.front().resolved_conflict) return labels.front();
  for (const auto& l : labels) {
    if (!same_judgement(l, labels.front())) return std::nullopt;
  }
  return labels.front();
}

std::optional<double> Store::labeler_agreement() const {
  std::shared_lock lock(mutex_);
  std::size_t multi = 0, agreed = 0;
  std::map<std::string, std::vector<LabelRecord>> by_target;
  for (const auto& [_, record] : table(Collection::Labels)) {
    auto l = record.get<LabelRecord>();
    if (!l.resolved_conflict) by_target[l.target].push_back(std::move(l));
  }
  for (const auto& [_, labels] : by_target) {
    if (labels.size() < 2) continue;
    ++multi;
    if (std::all_of(labels.begin(), labels.end(), [&](const LabelRecord& l) { return same_judgement(l, labels.front()); })) {
      ++agreed;
    }
  }
  if (multi == 0) return std::nullopt;
  return static_cast<double>(agreed) / static_cast<double>(multi);
}

std::size_t Store::export_jsonl(Collection c, const fs::path& path) const {
  std::shared_lock lock(mutex_);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot write " + tmp.string());
    for (const auto& [key, record] : table(c)) out << line_for(c, key, record).dump() << '\n';
    if (!out.flush()) fail(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::IoError, "cannot move export into place: " + ec.message());
  return table(c).size();
}

std::size_t Store::import_jsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
  std::vector<Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    entries.push_back(decode_line(line, line_no));
  }
  std::unique_lock lock(mutex_);
  for (const auto& e : entries) write(e.collection, e.key, e.record);
  return entries.size();
}

std::vector<fs::path> Store::snapshot(int round) const {
  require(dir_.has_value(), ErrorCode::PreconditionFailed, "memory-only store has no snapshot directory");
  std::vector<fs::path> paths;
  for (Collection c : kAllCollections) {
    const fs::path p = *dir_ / (std::string(to_string(c)) + "." + std::to_string(round) + ".snap.jsonl");
    export_jsonl(c, p);
    paths.push_back(p);
  }
  return paths;
}

std::string Store::fingerprint() const {
  std::shared_lock lock(mutex_);
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::string_view bytes) {
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0x1f;
    h *= 1099511628211ULL;
  };
  for (Collection c : kAllCollections) {
    mix(to_string(c));
    for (const auto& [key, record] : table(c)) {
      mix(key);
      mix(record.dump());
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pip
