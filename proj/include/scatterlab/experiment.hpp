#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scatterlab/config.hpp"
#include "scatterlab/regularity.hpp"

/// Monte Carlo orchestration: per-trial sampling, solving, estimation and
/// persistence, plus the run manifest.
///
/// Trial t draws everything from derive_stream({base_seed, 0}, "trial", t), so
/// outputs do not depend on the number of workers or on scheduling.
namespace scatterlab::experiment {

inline constexpr const char* kVersion = "scatterlab 1.0.0";

struct TrialRecord {
  int trial = 0;
  SeedSpec seed{};
  bool ok = false;
  std::string error_kind;
  std::string error_message;
  std::vector<std::string> files;
  int iterations = 0;
  double final_residual = 0.0;
  std::optional<regularity::RegularityEstimate> estimate;
  std::string estimate_error;
  /// consistent / inconsistent / inconclusive, or "n/a" when the medium order
  /// lies outside the admissible window.
  std::string verdict = "n/a";
  std::string started_at;
  std::string finished_at;
  double wall_time = 0.0;
};

struct RunManifest {
  std::string version = kVersion;
  std::string config_ini;
  int workers = 1;
  std::string started_at;
  std::string finished_at;
  std::vector<TrialRecord> trials;

  std::string to_json() const;
};

/// Seed of trial t.
SeedSpec trial_seed(const config::ExperimentConfig& config, int trial);

/// Samples, solves, estimates and writes the files of one trial into `out`.
/// Solver and sampling errors are recorded in the returned record.
TrialRecord run_trial(const config::ExperimentConfig& config, int trial, const std::filesystem::path& out);

/// Runs every trial on `workers` threads and writes estimates.csv,
/// aggregate.csv and manifest.json into config.output.
RunManifest run_experiment(const config::ExperimentConfig& config, int workers);

/// Worker count from the flag, else SCATTERLAB_WORKERS, else 1.
int resolve_workers(std::optional<int> flag);

/// Configuration echoed in a manifest written by run_experiment.
config::ExperimentConfig config_from_manifest(const std::filesystem::path& manifest);

/// Rows shared by estimates.csv and the single-solve subcommands.
std::vector<std::string> estimate_header();
std::vector<std::string> estimate_row(const TrialRecord& r);

}  // namespace scatterlab::experiment
