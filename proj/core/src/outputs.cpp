#include "lpplab/outputs.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "lpplab/errors.hpp"
#include "lpplab/scaling.hpp"
#include "lpplab/svg.hpp"

namespace lpplab {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json num_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

double num_from(const ordered_json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot open " + p.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw OutputError("failed writing " + p.string());
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw OutputError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text, std::size_t columns,
                                               const std::string& header) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != header) throw OutputError("line 1: expected header '" + header + "'");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != columns) {
      throw OutputError("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                        " columns, got " + std::to_string(cells.size()));
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

constexpr const char* kSamplesHeader = "replica,n,param1,param2,value";
constexpr const char* kExitsHeader = "replica,n,k,z";

std::string group_label(std::int64_t n, double p1, double p2) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "n=%lld p1=%g p2=%g", static_cast<long long>(n), p1, p2);
  return buf;
}

Series ecdf_series(std::string label, std::vector<double> v) {
  std::sort(v.begin(), v.end());
  Series s{std::move(label), {}, {}};
  const std::size_t points = std::min<std::size_t>(v.size(), 200);
  for (std::size_t q = 0; q < points; ++q) {
    const std::size_t idx = points == 1 ? 0 : q * (v.size() - 1) / (points - 1);
    s.x.push_back(v[idx]);
    s.y.push_back(static_cast<double>(idx + 1) / static_cast<double>(v.size()));
  }
  return s;
}

Series tail_series(std::string label, const std::vector<double>& z, std::int64_t n) {
  std::vector<double> r;
  for (double x = 0.0; x <= 8.0 + 1e-12; x += 0.25) r.push_back(x);
  const auto c = tail_curve(SampleSet::of(label, z), n, 0.0, r);
  return Series{std::move(label), c.r, c.R};
}

}  // namespace

std::string report_json(const Report& r) {
  ordered_json j;
  j["experiment"] = r.experiment;
  j["config_digest"] = r.config_digest;
  j["passed"] = r.passed();
  j["checks"] = ordered_json::array();
  for (const auto& v : r.checks) {
    ordered_json c;
    c["name"] = v.name;
    c["metric"] = num_or_null(v.metric);
    c["threshold"] = num_or_null(v.threshold);
    c["pass"] = v.pass;
    c["ci"] = v.ci ? ordered_json::array({num_or_null(v.ci->first), num_or_null(v.ci->second)})
                   : ordered_json(nullptr);
    c["error"] = num_or_null(v.error);
    j["checks"].push_back(std::move(c));
  }
  j["artifacts"] = r.artifacts;
  return j.dump(2) + "\n";
}

Report parse_report_json(const std::string& text) {
  Report r;
  try {
    const auto j = ordered_json::parse(text);
    r.experiment = j.at("experiment").get<std::string>();
    r.config_digest = j.at("config_digest").get<std::string>();
    for (const auto& c : j.at("checks")) {
      Verdict v;
      v.name = c.at("name").get<std::string>();
      v.metric = num_from(c.at("metric"));
      v.threshold = num_from(c.at("threshold"));
      v.pass = c.at("pass").get<bool>();
      if (!c.at("ci").is_null()) v.ci = std::pair{num_from(c["ci"][0]), num_from(c["ci"][1])};
      v.error = num_from(c.at("error"));
      r.checks.push_back(std::move(v));
    }
    r.artifacts = j.at("artifacts").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw OutputError(std::string("malformed report.json: ") + e.what());
  }
  return r;
}

std::string samples_csv(const std::vector<SampleRow>& rows) {
  std::string s = std::string(kSamplesHeader) + "\n";
  for (const auto& r : rows) {
    s += std::to_string(r.replica) + "," + std::to_string(r.n) + "," + g17(r.param1) + "," + g17(r.param2) +
         "," + g17(r.value) + "\n";
  }
  return s;
}

std::string exits_csv(const std::vector<ExitRow>& rows) {
  std::string s = std::string(kExitsHeader) + "\n";
  for (const auto& r : rows) {
    s += std::to_string(r.replica) + "," + std::to_string(r.n) + "," + std::to_string(r.k) + "," +
         std::to_string(r.z) + "\n";
  }
  return s;
}

std::vector<SampleRow> parse_samples_csv(const std::string& text) {
  std::vector<SampleRow> out;
  try {
    for (const auto& c : csv_rows(text, 5, kSamplesHeader)) {
      out.push_back({std::stoull(c[0]), std::stoll(c[1]), std::stod(c[2]), std::stod(c[3]), std::stod(c[4])});
    }
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const OutputError*>(&e)) throw;
    throw OutputError(std::string("malformed samples.csv: ") + e.what());
  }
  return out;
}

std::vector<ExitRow> parse_exits_csv(const std::string& text) {
  std::vector<ExitRow> out;
  try {
    for (const auto& c : csv_rows(text, 4, kExitsHeader)) {
      out.push_back({std::stoull(c[0]), std::stoll(c[1]), std::stoll(c[2]), std::stoll(c[3])});
    }
  } catch (const std::logic_error& e) {
    throw OutputError(std::string("malformed exits.csv: ") + e.what());
  }
  return out;
}

std::vector<PlotFile> plots_for(const std::string& experiment, const std::vector<SampleRow>& samples,
                                const std::vector<ExitRow>& exits) {
  constexpr std::size_t kMaxSeries = 10;
  std::vector<PlotFile> out;
  if (!samples.empty()) {
    std::vector<std::tuple<std::int64_t, double, double>> order;
    std::map<std::tuple<std::int64_t, double, double>, std::vector<double>> groups;
    for (const auto& r : samples) {
      const auto key = std::tuple{r.n, r.param1, r.param2};
      auto [it, fresh] = groups.try_emplace(key);
      if (fresh) order.push_back(key);
      it->second.push_back(r.value);
    }
    LineChart chart{experiment + ": empirical CDFs", "value", "F(value)", {}};
    for (std::size_t q = 0; q < order.size() && q < kMaxSeries; ++q) {
      const auto& [n, p1, p2] = order[q];
      chart.series.push_back(ecdf_series(group_label(n, p1, p2), groups[order[q]]));
    }
    out.push_back({"samples_ecdf.svg", render_svg(chart)});

    if (experiment == "localization") {
      LineChart tails{experiment + ": exit tails", "r", "P(|Z| >= r n^{2/3})", {}, true};
      for (std::size_t q = 0; q < order.size() && q < kMaxSeries; ++q) {
        const auto& [n, p1, p2] = order[q];
        tails.series.push_back(tail_series(group_label(n, p1, p2), groups[order[q]], n));
      }
      out.push_back({"exit_tails.svg", render_svg(tails)});
    }
  }
  if (!exits.empty()) {
    std::vector<std::pair<std::int64_t, std::int64_t>> order;
    std::map<std::pair<std::int64_t, std::int64_t>, std::vector<double>> groups;
    for (const auto& r : exits) {
      const auto key = std::pair{r.n, r.k};
      auto [it, fresh] = groups.try_emplace(key);
      if (fresh) order.push_back(key);
      it->second.push_back(static_cast<double>(r.z));
    }
    LineChart tails{experiment + ": exit tails", "r", "P(|Z| >= r n^{2/3})", {}, true};
    for (std::size_t q = 0; q < order.size() && q < kMaxSeries; ++q) {
      const auto [n, k] = order[q];
      tails.series.push_back(tail_series("n=" + std::to_string(n) + " k=" + std::to_string(k), groups[order[q]], n));
    }
    out.push_back({"exit_tails.svg", render_svg(tails)});

    const auto [n0, k0] = order.front();
    Histogram h(-5.0, 5.0, 50);
    const double unit = std::cbrt(4.0) * n_two_thirds(n0);
    for (double z : groups[order.front()]) h.add(z / unit);
    out.push_back({"exit_histogram.svg",
                   render_histogram_svg(h, experiment + ": scaled exits, n=" + std::to_string(n0) +
                                               " k=" + std::to_string(k0),
                                        "Z / (2^{2/3} n^{2/3})")});
  }
  return out;
}

std::vector<std::filesystem::path> emit_outputs(RunResult& result, const std::filesystem::path& dir,
                                                bool plots) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_file(dir / name, text);
    written.push_back(dir / name);
  };
  result.report.artifacts.clear();
  emit("samples.csv", samples_csv(result.samples));
  emit("exits.csv", exits_csv(result.exits));
  result.report.artifacts = {"samples.csv", "exits.csv"};
  if (plots) {
    for (const auto& p : plots_for(result.report.experiment, result.samples, result.exits)) {
      emit(p.name, p.svg);
      result.report.artifacts.push_back(p.name);
    }
  }
  emit("report.json", report_json(result.report));
  return written;
}

std::vector<std::filesystem::path> rerender_outputs(const std::filesystem::path& dir) {
  Report report = parse_report_json(read_file(dir / "report.json"));
  const auto samples = parse_samples_csv(read_file(dir / "samples.csv"));
  const auto exits = parse_exits_csv(read_file(dir / "exits.csv"));
  std::vector<std::filesystem::path> written;
  report.artifacts = {"samples.csv", "exits.csv"};
  for (const auto& p : plots_for(report.experiment, samples, exits)) {
    write_file(dir / p.name, p.svg);
    written.push_back(dir / p.name);
    report.artifacts.push_back(p.name);
  }
  write_file(dir / "report.json", report_json(report));
  written.push_back(dir / "report.json");
  return written;
}

}  // namespace lpplab
