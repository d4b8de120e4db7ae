#pragma once

#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "pip/model.hpp"

namespace pip {

enum class Collection { Posts, Accounts, Contacts, Keywords, Labels, Revisits, Campaigns };
inline constexpr std::array<Collection, 7> kAllCollections = {
    Collection::Posts,  Collection::Accounts, Collection::Contacts,  Collection::Keywords,
    Collection::Labels, Collection::Revisits, Collection::Campaigns,
};
std::string_view to_string(Collection c) noexcept;
std::optional<Collection> parse_collection(std::string_view name);

inline constexpr std::size_t kMaxTextLength = 10000;
inline constexpr std::size_t kMaxPollOptions = 4;

/// Throws InvalidEntity when an entity breaks its invariants.
void validate(const Post& post);
void validate(const Account& account);
void validate(const Contact& contact);
void validate(const Keyword& keyword);
void validate(const LabelRecord& label);
void validate(const RevisitRecord& record);

struct LabelConflict {
  std::string target;
  std::vector<LabelRecord> labels;  // the disagreeing labels, one per labeler
};

/// In-memory indexes backed by an append-only JSONL journal. Every mutation is
/// written (and flushed) to the journal before the index changes; opening a
/// store replays the journal. Writers are serialized, readers share a lock.
class Store {
 public:
  static constexpr int kSchemaVersion = 1;

  /// Memory-only store.
  Store();
  /// Opens or creates `dir/journal.jsonl` and replays it. A torn final line
  /// (no trailing newline) is discarded; any other bad line is a ParseError.
  explicit Store(const std::filesystem::path& dir);
  ~Store();

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  const std::optional<std::filesystem::path>& dir() const noexcept { return dir_; }

  std::string put_post(const Post& post);
  std::string put_account(const Account& account);
  std::string put_contact(const Contact& contact);
  std::string put_keyword(const Keyword& keyword);
  std::string put_label(const LabelRecord& label);
  std::string put_revisit(const RevisitRecord& record);
  std::string put_campaign(const std::string& id, const Json& campaign);

  bool is_novel(const std::string& post_id) const;
  /// Atomic novelty check plus insert; true when this call stored the post.
  bool insert_if_novel(const Post& post);

  std::optional<Post> post(const std::string& id) const;
  std::optional<Account> account(const std::string& id) const;
  std::optional<Keyword> keyword(const std::string& key) const;
  std::optional<Json> campaign(const std::string& id) const;

  /// Records in key order.
  std::vector<Post> posts() const;
  std::vector<Account> accounts() const;
  std::vector<Contact> contacts() const;
  std::vector<Keyword> keywords() const;
  std::vector<LabelRecord> labels() const;
  std::vector<RevisitRecord> revisits() const;
  std::vector<std::pair<std::string, Json>> campaigns() const;

  std::size_t size(Collection c) const;
  /// Stored PIP-labeled posts by the account, counted on demand.
  std::size_t pip_count(const std::string& account_id) const;

  /// Active labels by target: the resolution when one exists, otherwise the
  /// labels of each labeler.
  std::vector<LabelRecord> labels_for(const std::string& target) const;
  /// Targets whose labelers disagree and that have no resolution yet.
  std::vector<LabelConflict> conflicts() const;
  /// Writes the canonical label for a conflicted target; NotFound if the
  /// target has no labels.
  LabelRecord resolve_conflict(const std::string& target, bool is_pip, std::optional<Category> category,
                               const std::string& labeler_id, Timestamp time);
  /// The resolution if present, else the agreed label; nullopt when unlabeled
  /// or in conflict.
  std::optional<LabelRecord> canonical_label(const std::string& target) const;
  /// Share of targets labeled by at least two labelers on which all agree;
  /// nullopt when no target has two labelers.
  std::optional<double> labeler_agreement() const;

  /// One schema-versioned JSON object per line. Returns the record count.
  std::size_t export_jsonl(Collection c, const std::filesystem::path& path) const;
  /// Validates every line first (ParseError naming the 1-based line), then
  /// upserts all records through the journal. Returns the record count.
  std::size_t import_jsonl(const std::filesystem::path& path);
  /// Writes `<collection>.<round>.snap.jsonl` into the store directory for
  /// every collection; returns the paths written.
  std::vector<std::filesystem::path> snapshot(int round) const;

  /// Digest of the full index state, for replay comparisons.
  std::string fingerprint() const;

 private:
  struct Entry {
    Collection collection;
    std::string key;
    Json record;
  };

  static Entry decode_line(const std::string& line, std::size_t line_no);
  Json line_for(Collection c, const std::string& key, const Json& record) const;
  // Caller holds the write lock.
  std::string write(Collection c, const std::string& key, const Json& record);
  void apply(Collection c, const std::string& key, const Json& record);
  void replay();
  std::map<std::string, Json>& table(Collection c);
  const std::map<std::string, Json>& table(Collection c) const;
  std::vector<LabelRecord> target_labels_locked(const std::string& target) const;

  std::optional<std::filesystem::path> dir_;
  std::FILE* journal_ = nullptr;
  mutable std::shared_mutex mutex_;
  std::array<std::map<std::string, Json>, kAllCollections.size()> tables_;
};

}  // namespace pip
