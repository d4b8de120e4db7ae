#include "pip/workspace.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "pip/error.hpp"
#include "pip/synth.hpp"
// Eigen must be seen before httplib: <resolv.h> defines a `_res` macro.
#include "pip/osnsim_http.hpp"

namespace pip {

namespace fs = std::filesystem;

namespace {

template <class S>
class SourcePlatform final : public Platform {
 public:
  explicit SourcePlatform(S& s) : s_(s) {}
  std::vector<Post> search_hashtag(const std::string& tag, std::size_t limit) override {
    return s_.search_hashtag(tag, limit);
  }
  std::vector<Post> account_timeline(const std::string& account, std::size_t limit) override {
    return s_.account_timeline(account, limit);
  }
  std::optional<Account> get_profile(const std::string& account) override { return s_.get_profile(account); }
  AvailabilityStatus check_availability(const std::string& post_id, Timestamp t) override {
    return s_.check_availability(post_id, t);
  }
  FetchResult fetch(const std::string& url) override { return s_.fetch(url); }
  ThreatReport report(const std::string& url) override { return s_.report(url); }
  Timestamp now() override { return s_.now(); }
  Timestamp advance(double days) override {
    if constexpr (std::is_same_v<S, sim::Simulator>) {
      s_.advance(days);
      return s_.now();
    } else {
      return s_.advance(days);
    }
  }

 private:
  S& s_;
};

void write_atomic(const fs::path& path, const std::string& content) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
    out << content;
    if (!out) fail(ErrorCode::IoError, "short write to " + path.string());
  }
  fs::rename(tmp, path);
}

Json read_json(const fs::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

}  // namespace

std::unique_ptr<Platform> wrap_platform(sim::Simulator& sim) {
  return std::make_unique<SourcePlatform<sim::Simulator>>(sim);
}
std::unique_ptr<Platform> wrap_platform(sim::SimClient& client) {
  return std::make_unique<SourcePlatform<sim::SimClient>>(client);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Workspace::Workspace(PipelineConfig config, bool dry_run) : config_(std::move(config)), dry_run_(dry_run) {
  config_.validate();
}

Workspace::~Workspace() {
  platform_.reset();
  store_.reset();
  if (scratch_) {
    std::error_code ec;
    fs::remove_all(*scratch_, ec);
  }
}

Store& Workspace::store() {
  if (store_) return *store_;
  if (!dry_run_) {
    fs::create_directories(store_dir());
    store_ = std::make_unique<Store>(store_dir());
    return *store_;
  }
  std::random_device rd;
  std::ostringstream name;
  name << "pip-dry-" << std::hex << rd() << rd();
  scratch_ = fs::temp_directory_path() / name.str();
  fs::create_directories(*scratch_);
  if (fs::exists(store_dir())) fs::copy(store_dir(), *scratch_, fs::copy_options::recursive);
  store_ = std::make_unique<Store>(*scratch_);
  return *store_;
}

bool Workspace::has_manifest() const { return fs::exists(manifest_path()); }

sim::SimCorpusManifest Workspace::manifest() const {
  if (!has_manifest()) fail(ErrorCode::PreconditionFailed, "no manifest at " + manifest_path().string());
  auto m = sim::load_manifest(manifest_path().string());
  if (config_.rate) m.rate_budget = *config_.rate;
  return m;
}

Platform& Workspace::platform() {
  if (platform_) return *platform_;
  if (!config_.sim_url.empty()) {
    client_ = std::make_unique<sim::SimClient>(config_.sim_url);
    platform_ = wrap_platform(*client_);
    return *platform_;
  }
  simulator_ = std::make_unique<sim::Simulator>(manifest());
  if (fs::exists(clock_path())) {
    const Timestamp saved = read_json(clock_path()).at("now").get<Timestamp>();
    if (saved > simulator_->now()) {
      simulator_->advance(static_cast<double>(saved - simulator_->now()) / static_cast<double>(kSecondsPerDay));
    }
  }
  platform_ = wrap_platform(*simulator_);
  return *platform_;
}

void Workspace::save_clock() {
  if (!simulator_ || dry_run_) return;
  write_atomic(clock_path(), Json{{"now", simulator_->now()}}.dump() + "\n");
}

std::optional<StoredClassifier> Workspace::load_classifier() const {
  if (!fs::exists(classifier_path())) return std::nullopt;
  const Json j = read_json(classifier_path());
  StoredClassifier out;
  out.version = j.at("model_version").get<int>();
  out.classifier = TextClassifier::from_json(j.at("classifier"));
  return out;
}

StoredClassifier Workspace::require_classifier() const {
  auto c = load_classifier();
  if (!c) fail(ErrorCode::PreconditionFailed, "no trained classifier; run `train` first");
  return std::move(*c);
}

void Workspace::save_classifier(const StoredClassifier& c) {
  if (dry_run_) return;
  write_atomic(classifier_path(), Json{{"model_version", c.version}, {"classifier", c.classifier.to_json()}}.dump());
}

std::optional<TaggerModel> Workspace::load_tagger() const {
  if (!fs::exists(tagger_path())) return std::nullopt;
  return TaggerModel::from_json(read_json(tagger_path()));
}

void Workspace::save_tagger(const TaggerModel& t) {
  if (dry_run_) return;
  write_atomic(tagger_path(), t.to_json().dump());
}

TaggerModel Workspace::tagger_or_default() const {
  if (auto t = load_tagger()) return std::move(*t);
  return train_tagger(synth::generate_ner_corpus(config_.tagger_sentences, config_.seed));
}

std::vector<LabeledText> Workspace::store_labels() {
  Store& s = store();
  std::vector<LabeledText> out;
  std::set<std::string> seen;
  for (const auto& l : s.labels()) {
    if (!seen.insert(l.target).second) continue;
    const auto canonical = s.canonical_label(l.target);
    if (!canonical) continue;
    std::string text;
    if (auto p = s.post(l.target)) {
      text = p->full_text();
    } else if (auto a = s.account(l.target)) {
      text = a->profile_text;
    } else {
      continue;
    }
    out.push_back({std::move(text), canonical->is_pip, canonical->is_pip ? canonical->category : std::nullopt});
  }
  return out;
}

std::vector<LabeledText> Workspace::training_data() {
  const auto corpus =
      sim::generate_corpus(sim::reference_mix_manifest(config_.ground_truth_pips, config_.ground_truth_benign, config_.seed));
  std::vector<LabeledText> data;
  data.reserve(corpus.posts.size() + corpus.accounts.size());
  for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
    data.push_back({corpus.posts[i].full_text(), corpus.labels[i].is_pip, corpus.labels[i].category});
  }
  for (std::size_t i = 0; i < corpus.accounts.size(); ++i) {
    data.push_back({corpus.accounts[i].profile_text, corpus.account_labels[i].promotes_in_profile, std::nullopt});
  }
  for (auto& l : store_labels()) data.push_back(std::move(l));
  return data;
}

fs::path Workspace::write_report(const std::string& name, const std::string& content) {
  const fs::path path = reports_dir() / name;
  write_file(path, content);
  return path;
}

void Workspace::write_file(const fs::path& path, const std::string& content) {
  if (dry_run_) return;
  write_atomic(path, content);
}

}  // namespace pip
