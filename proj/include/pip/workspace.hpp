#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pip/config.hpp"
#include "pip/contacts.hpp"
#include "pip/osnsim.hpp"
#include "pip/pipeline.hpp"
#include "pip/source.hpp"
#include "pip/store.hpp"

namespace pip {

namespace sim {
class SimClient;
}

/// Everything the pipeline reads from the platform, plus its clock.
class Platform : public PostSource, public AvailabilitySource, public Fetcher, public IntelClient {
 public:
  virtual Timestamp now() = 0;
  /// Returns the new time.
  virtual Timestamp advance(double days) = 0;
};

std::unique_ptr<Platform> wrap_platform(sim::Simulator& sim);
std::unique_ptr<Platform> wrap_platform(sim::SimClient& client);

/// Versioned classifier file: {"model_version", "classifier"}.
struct StoredClassifier {
  int version = 0;
  TextClassifier classifier;
};

/// On-disk layout under the configured workspace:
///
///   store/journal.jsonl   seeds.txt         sim/manifest.json  sim/clock.json
///   models/classifier.json models/tagger.json rounds.jsonl revisits.jsonl
///   reports/
///
/// A dry-run workspace works on a throwaway copy of the store and never
/// writes under the workspace.
class Workspace {
 public:
  explicit Workspace(PipelineConfig config, bool dry_run = false);
  ~Workspace();
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  const PipelineConfig& config() const noexcept { return config_; }
  bool dry_run() const noexcept { return dry_run_; }

  const std::filesystem::path& root() const noexcept { return config_.workspace; }
  std::filesystem::path store_dir() const { return config_.resolve(config_.store_dir); }
  std::filesystem::path seeds_path() const { return config_.resolve(config_.seeds); }
  std::filesystem::path manifest_path() const { return config_.resolve(config_.manifest); }
  std::filesystem::path clock_path() const { return manifest_path().parent_path() / "clock.json"; }
  std::filesystem::path classifier_path() const { return root() / "models" / "classifier.json"; }
  std::filesystem::path tagger_path() const { return root() / "models" / "tagger.json"; }
  std::filesystem::path rounds_log() const { return root() / "rounds.jsonl"; }
  std::filesystem::path revisits_log() const { return root() / "revisits.jsonl"; }
  std::filesystem::path reports_dir() const { return root() / "reports"; }

  /// Opened on first use.
  Store& store();

  bool has_manifest() const;
  /// The manifest with the configured rate budget applied.
  sim::SimCorpusManifest manifest() const;

  /// The remote simulator when sim_url is set, otherwise an in-process one
  /// restored to the saved clock. Fails with PreconditionFailed without a
  /// manifest.
  Platform& platform();
  /// nullptr when remote or not yet opened.
  sim::Simulator* simulator() noexcept { return simulator_.get(); }
  /// Persists the in-process clock.
  void save_clock();

  std::optional<StoredClassifier> load_classifier() const;
  /// Fails with PreconditionFailed when no model has been trained.
  StoredClassifier require_classifier() const;
  void save_classifier(const StoredClassifier& c);
  std::optional<TaggerModel> load_tagger() const;
  void save_tagger(const TaggerModel& t);
  /// The stored tagger, or one trained on the synthetic sentences.
  TaggerModel tagger_or_default() const;

  /// Synthetic reference-mix posts and profiles followed by every store
  /// target with a canonical label.
  std::vector<LabeledText> training_data();
  /// Canonically labeled store targets only.
  std::vector<LabeledText> store_labels();

  /// Writes reports/<name>; skipped on a dry run. Returns the path.
  std::filesystem::path write_report(const std::string& name, const std::string& content);
  /// Writes a workspace file, creating directories; skipped on a dry run.
  void write_file(const std::filesystem::path& path, const std::string& content);

 private:
  PipelineConfig config_;
  bool dry_run_ = false;
  std::optional<std::filesystem::path> scratch_;
  std::unique_ptr<Store> store_;
  std::unique_ptr<sim::Simulator> simulator_;
  std::unique_ptr<sim::SimClient> client_;
  std::unique_ptr<Platform> platform_;
};

std::string read_text(const std::filesystem::path& path);

}  // namespace pip
