#pragma once

// Flat key = value experiment configuration.
//
//   # comment
//   experiment = local-brownian
//   n = [4096]
//   x = [0.25, 0.5, 1]
//   threshold.ks = 0.05
//
// List keys accept a bracketed, comma-separated list or a single scalar.
// Keys not given take the defaults of the named preset.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lpplab {

struct ExperimentConfig {
  std::string experiment;
  std::vector<std::int64_t> n;
  std::int64_t replicas = 1000;
  std::uint64_t seed = 1;
  double C = 1.0;
  std::vector<double> r;
  std::optional<double> gamma;
  std::vector<double> rho;
  double control_rho = 0.6;
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> x;
  double epsilon = 0.1;
  std::vector<std::string> profiles;
  std::string variant = "local";
  std::map<std::string, double> thresholds;
  bool plots = true;
  // Execution knobs; they do not affect results and are excluded from the digest.
  std::string out = "lpplab-out";
  int workers = 1;

  /// Threshold by name; throws ConfigError if the preset did not define it.
  double threshold(const std::string& name) const;
};

/// Throws ConfigError (with the line number) on syntax errors, unknown keys,
/// unknown presets and invariant violations.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Enforces: n >= C^3 for every n, gamma in (0, 2/3), replicas >= 1,
/// workers >= 1, rho in (0, 1), grids within [-C, C], r nonnegative and
/// nondecreasing, known profile names and variant.
void validate(const ExperimentConfig& cfg);

/// Canonical text form: every key, fixed order, shortest round-trip numbers.
std::string serialize(const ExperimentConfig& cfg, bool include_execution = true);

/// FNV-1a 64 of the canonical form without execution knobs, as 16 hex digits.
std::string config_digest(const ExperimentConfig& cfg);

}  // namespace lpplab
