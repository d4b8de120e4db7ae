#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "pip/classify.hpp"
#include "pip/hunt.hpp"
#include "pip/monitor.hpp"
#include "pip/osnsim.hpp"

namespace pip {

/// Operator configuration. The text form is `key = value` lines grouped under
/// `[section]` headers; `#` starts a comment, strings may be double-quoted.
///
///   workspace = "runs/demo"
///   [hunt]
///   rcp_threshold = 0.01
///
/// Relative paths resolve against `workspace`.
struct PipelineConfig {
  std::filesystem::path workspace = ".";
  std::filesystem::path store_dir = "store";
  std::filesystem::path seeds = "seeds.txt";
  std::filesystem::path manifest = "sim/manifest.json";
  /// Base URL of a running simulator; empty runs it in-process from `manifest`.
  std::string sim_url;

  HuntConfig hunt;
  int revisit_cadence_days = kDefaultCadenceDays;
  int revisit_ticks = 4;
  std::size_t cohort_sample = 50000;

  TrainConfig train;
  std::size_t min_df = 2;
  std::size_t kfold = 5;
  /// Size of the synthetic ground truth the classifiers are trained on.
  std::size_t ground_truth_pips = 8408;
  std::size_t ground_truth_benign = 4773;
  std::size_t tagger_sentences = 2000;

  /// Overrides the manifest's budget for an in-process simulator.
  std::optional<sim::RateBudget> rate;
  std::uint64_t seed = 42;
  int api_port = 8080;

  /// Fails with PreconditionFailed naming the offending key.
  void validate() const;
  std::filesystem::path resolve(const std::filesystem::path& p) const;

  std::string to_text() const;
  Json to_json() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Unknown keys, bad values and malformed lines raise ParseError with the
/// 1-based line; the result is validated.
PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace pip
