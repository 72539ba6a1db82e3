#pragma once
// Experiment configuration (strict JSON schema), the analysis runner, and
// report/CSV emission. All outputs are accumulated in memory and written
// only on success, so failed runs leave no partial files.
//
// Determinism contract: identical resolved config + seed produce
// byte-identical reports and CSVs, regardless of the worker thread count.
// The only exception is the report's "timestamp" field.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "caplab/common.hpp"
#include "caplab/learners.hpp"
#include "caplab/problem.hpp"

namespace caplab {

using ordered_json = nlohmann::ordered_json;

/// Exit codes shared by the CLI and the runner.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitValidation = 2,
  kExitCapacityLimit = 3,
};

struct ExperimentConfig {
  int schema_version = 1;
  std::uint64_t seed = 0;
  Mode mode = Mode::Averaged;
  InstanceSpace space;
  std::string hypothesis_space_kind;  // lookup_tables | lookup_tables_with_mixed | thresholds
  ordered_json dataset_dist;          // validated sub-object
  ordered_json learner;               // validated sub-object
  ordered_json analyses;              // validated sub-object
  ordered_json resolved;              // full config with defaults materialized
};

/// Parse + strictly validate a config document (unknown keys are rejected,
/// enums checked, cross-field constraints enforced). ValidationError on any
/// problem.
ExperimentConfig parse_config(const ordered_json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Build the configured objects (shared by run and validate).
std::shared_ptr<const HypothesisSpace> build_hypothesis_space(
    const ExperimentConfig& cfg);
DatasetDistribution build_dataset_distribution(const ExperimentConfig& cfg);
LearnerProfile build_learner(const ExperimentConfig& cfg,
                             std::shared_ptr<const HypothesisSpace> gspace);

struct OutputFile {
  std::string name;     // relative to the output directory
  std::string content;
};

struct RunResultBundle {
  ordered_json report;
  std::vector<OutputFile> csv_files;
};

/// Execute every configured analysis. Throws ValidationError /
/// CapacityLimitError / ConstructionError for the documented exit codes.
RunResultBundle run_experiment(const ExperimentConfig& cfg, unsigned threads,
                               std::optional<std::string> corpus_root = {});

/// Bits value for reports: finite doubles stay numeric, infinities become
/// the string sentinels "INFINITE" / "NEGATIVE_INFINITE".
ordered_json bits_json(double v);

/// ISO-8601 UTC timestamp (the one non-deterministic report field).
std::string utc_timestamp();

}  // namespace caplab
