// lpplab: run LPP experiments, list presets, run the comparison audits,
// re-render stored reports.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lpplab/config.hpp"
#include "lpplab/errors.hpp"
#include "lpplab/harness.hpp"
#include "lpplab/outputs.hpp"

using namespace lpplab;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> workers;
  std::vector<std::int64_t> n;
  std::optional<std::int64_t> replicas;

  void add_to(CLI::App* app, bool with_n) {
    app->add_option("--seed", seed, "Master seed");
    app->add_option("--out", out, "Output directory");
    app->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    if (with_n) app->add_option("--n", n, "Override the list of sizes (comma separated)")->delimiter(',');
    app->add_option("--replicas", replicas, "Override the replica count")->check(CLI::PositiveNumber);
  }

  void apply(ExperimentConfig& cfg) const {
    if (seed) cfg.seed = *seed;
    if (out) cfg.out = *out;
    if (workers) cfg.workers = *workers;
    if (!n.empty()) cfg.n = n;
    if (replicas) cfg.replicas = *replicas;
    validate(cfg);
  }
};

void print_report(const Report& r, std::ostream& os) {
  for (const auto& v : r.checks) {
    os << (v.pass ? "PASS " : "FAIL ") << v.name << "  metric=" << v.metric << " threshold=" << v.threshold
       << "\n";
  }
  os << r.experiment << ": " << (r.passed() ? "all checks passed" : "some checks FAILED") << " ("
     << r.checks.size() << " checks, digest " << r.config_digest;
  if (r.wall_seconds > 0.0) os << ", " << r.wall_seconds << " s";
  os << ")\n";
}

bool run_one(ExperimentConfig cfg, const std::string& out_dir) {
  auto result = run_experiment(cfg);
  const auto files = emit_outputs(result, out_dir, cfg.plots);
  print_report(result.report, std::cout);
  std::cout << "wrote " << files.size() << " files to " << out_dir << "\n";
  return result.report.passed();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential last-passage percolation experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one experiment");
  std::string config_path, experiment;
  Overrides run_over;
  run->add_option("--config", config_path, "Config file (key = value)")->check(CLI::ExistingFile);
  run->add_option("--experiment", experiment, "Preset name (when no config file is given)");
  run_over.add_to(run, true);

  auto* list = app.add_subcommand("list", "List presets and the claims they check");

  auto* audit = app.add_subcommand("audit", "Run the deterministic comparison and identity audits");
  Overrides audit_over;
  audit_over.add_to(audit, false);

  auto* report = app.add_subcommand("report", "Re-render report.json and plots from stored samples");
  std::string report_dir;
  report->add_option("dir", report_dir, "Output directory of an earlier run")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& p : presets()) std::printf("%-24s %s\n", p.name.c_str(), p.claim.c_str());
      return 0;
    }
    if (*run) {
      if (config_path.empty() == experiment.empty()) {
        std::cerr << "run: give exactly one of --config or --experiment\n";
        return 2;
      }
      ExperimentConfig cfg = config_path.empty() ? preset_config(experiment) : load_config(config_path);
      run_over.apply(cfg);
      return run_one(cfg, cfg.out) ? 0 : 1;
    }
    if (*audit) {
      bool ok = true;
      for (const char* name : {"comparison-audit", "sandwich", "airy-identity"}) {
        ExperimentConfig cfg = preset_config(name);
        audit_over.apply(cfg);
        ok = run_one(cfg, cfg.out + "/" + name) && ok;
      }
      return ok ? 0 : 1;
    }
    if (*report) {
      for (const auto& p : rerender_outputs(report_dir)) std::cout << "wrote " << p.string() << "\n";
      const auto r = parse_report_json([&] {
        std::ifstream in(report_dir + "/report.json");
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
      }());
      print_report(r, std::cout);
      return r.passed() ? 0 : 1;
    }
  } catch (const ExperimentError& e) {
    std::cerr << "experiment failed at replica " << e.replica() << ": " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
