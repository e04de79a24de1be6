#pragma once

// samples.csv, exits.csv, report.json and SVG plots.

#include <filesystem>
#include <string>
#include <vector>

#include "lpplab/harness.hpp"

namespace lpplab {

/// Canonical JSON: fixed key order, shortest round-trip numbers, no wall clock.
std::string report_json(const Report& report);
Report parse_report_json(const std::string& text);

std::string samples_csv(const std::vector<SampleRow>& rows);
std::string exits_csv(const std::vector<ExitRow>& rows);
/// Throws OutputError on malformed rows (with the line number).
std::vector<SampleRow> parse_samples_csv(const std::string& text);
std::vector<ExitRow> parse_exits_csv(const std::string& text);

struct PlotFile {
  std::string name;  ///< file name relative to the output directory
  std::string svg;
};

/// Plots derived from the stored samples only, so `report` can re-render
/// them: empirical CDFs per (n, param1, param2) group and exit tails per (n, k).
std::vector<PlotFile> plots_for(const std::string& experiment, const std::vector<SampleRow>& samples,
                                const std::vector<ExitRow>& exits);

/// Writes samples.csv, exits.csv, the plots (if requested) and report.json
/// into dir, records the artifact names in result.report, and returns the
/// written paths. Throws OutputError naming the path on I/O failure.
std::vector<std::filesystem::path> emit_outputs(RunResult& result, const std::filesystem::path& dir,
                                                bool plots = true);

/// Re-renders report.json and plots from a directory written by emit_outputs.
std::vector<std::filesystem::path> rerender_outputs(const std::filesystem::path& dir);

}  // namespace lpplab
