#pragma once

// Experiment presets, the replica work pool and reports.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "lpplab/config.hpp"
#include "lpplab/stats.hpp"

namespace lpplab {

struct PresetInfo {
  std::string name;
  std::string claim;  ///< the statement the preset checks
};

const std::vector<PresetInfo>& presets();

/// Default configuration of a preset. Throws ConfigError for unknown names.
ExperimentConfig preset_config(std::string_view name);

/// Row of samples.csv.
struct SampleRow {
  std::uint64_t replica = 0;
  std::int64_t n = 0;
  double param1 = 0.0;
  double param2 = 0.0;
  double value = 0.0;
};

/// Row of exits.csv.
struct ExitRow {
  std::uint64_t replica = 0;
  std::int64_t n = 0;
  std::int64_t k = 0;
  std::int64_t z = 0;
};

struct Report {
  std::string experiment;
  std::string config_digest;
  std::vector<Verdict> checks;
  std::vector<std::string> artifacts;  ///< file names relative to the output directory
  double wall_seconds = 0.0;           ///< not serialized

  bool passed() const;
};

struct RunResult {
  Report report;
  std::vector<SampleRow> samples;
  std::vector<ExitRow> exits;
};

/// Runs body(index) for index in [0, count) on `workers` threads. Each index
/// must write only its own result slot. If any body throws, rethrows as
/// ExperimentError for the smallest failing index, with its replica id
/// (id_base + index).
void for_each_replica(std::int64_t count, int workers, std::uint64_t id_base,
                      const std::function<void(std::int64_t)>& body);

/// Validates the config, runs the preset's replica plan and reduces the
/// samples into verdicts. Deterministic in the config; independent of
/// cfg.workers. Throws ConfigError for unknown presets.
RunResult run_experiment(const ExperimentConfig& cfg);

}  // namespace lpplab
