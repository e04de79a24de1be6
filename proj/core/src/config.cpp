#include "lpplab/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "lpplab/errors.hpp"
#include "lpplab/harness.hpp"
#include "lpplab/profiles.hpp"

namespace lpplab {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']') return {v};  // rejected by the scalar parser
    v = trim(v.substr(1, v.size() - 2));
    if (v.empty()) return out;
    std::size_t start = 0;
    while (true) {
      const auto comma = v.find(',', start);
      out.push_back(trim(v.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return out;
  }
  return {v};
}

double parse_real(std::string_view s, int line, std::string_view key) {
  // Accepts decimal literals and simple fractions such as 1/3.
  const auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    const double a = parse_real(trim(s.substr(0, slash)), line, key);
    const double b = parse_real(trim(s.substr(slash + 1)), line, key);
    if (b == 0.0) fail(line, std::string(key) + ": division by zero");
    return a / b;
  }
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
    fail(line, std::string(key) + ": expected a real number, got '" + std::string(s) + "'");
  }
  return v;
}

std::int64_t parse_int(std::string_view s, int line, std::string_view key) {
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    fail(line, std::string(key) + ": expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

std::string parse_string(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

bool parse_bool(std::string_view s, int line, std::string_view key) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  fail(line, std::string(key) + ": expected true or false");
}

std::string fmt(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string fmt(std::int64_t v) { return std::to_string(v); }

template <class T>
std::string fmt_list(const std::vector<T>& xs) {
  std::string s = "[";
  for (std::size_t q = 0; q < xs.size(); ++q) {
    if (q) s += ", ";
    if constexpr (std::is_same_v<T, std::string>) {
      s += xs[q];
    } else {
      s += fmt(xs[q]);
    }
  }
  return s + "]";
}

struct Entry {
  int line;
  std::string key;
  std::string_view value;
};

}  // namespace

double ExperimentConfig::threshold(const std::string& name) const {
  const auto it = thresholds.find(name);
  if (it == thresholds.end()) {
    throw ConfigError("experiment '" + experiment + "' has no threshold '" + name + "'");
  }
  return it->second;
}

ExperimentConfig parse_config(std::string_view text) {
  std::vector<Entry> entries;
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "empty key");
    if (!seen.insert(key).second) fail(line_no, "duplicate key '" + key + "'");
    entries.push_back({line_no, key, value});
  }

  ExperimentConfig cfg;
  bool named = false;
  for (const auto& e : entries) {
    if (e.key != "experiment") continue;
    try {
      cfg = preset_config(parse_string(e.value));
    } catch (const ConfigError& err) {
      fail(e.line, err.what());
    }
    named = true;
  }
  if (!named) throw ConfigError("missing required key 'experiment'");

  auto reals = [](const Entry& e) {
    std::vector<double> out;
    for (auto item : split_list(e.value)) out.push_back(parse_real(item, e.line, e.key));
    return out;
  };

  for (const auto& e : entries) {
    const auto& k = e.key;
    if (k == "experiment") continue;
    if (k == "n") {
      cfg.n.clear();
      for (auto item : split_list(e.value)) cfg.n.push_back(parse_int(item, e.line, k));
    } else if (k == "replicas") {
      cfg.replicas = parse_int(e.value, e.line, k);
    } else if (k == "seed") {
      const auto s = parse_int(e.value, e.line, k);
      if (s < 0) fail(e.line, "seed must be nonnegative");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else if (k == "C") {
      cfg.C = parse_real(e.value, e.line, k);
    } else if (k == "r") {
      cfg.r = reals(e);
    } else if (k == "gamma") {
      if (e.value == "none") {
        cfg.gamma.reset();
      } else {
        cfg.gamma = parse_real(e.value, e.line, k);
      }
    } else if (k == "rho") {
      cfg.rho = reals(e);
    } else if (k == "control_rho") {
      cfg.control_rho = parse_real(e.value, e.line, k);
    } else if (k == "u") {
      cfg.u = reals(e);
    } else if (k == "v") {
      cfg.v = reals(e);
    } else if (k == "x") {
      cfg.x = reals(e);
    } else if (k == "epsilon") {
      cfg.epsilon = parse_real(e.value, e.line, k);
    } else if (k == "profiles") {
      cfg.profiles.clear();
      for (auto item : split_list(e.value)) cfg.profiles.push_back(parse_string(item));
    } else if (k == "variant") {
      cfg.variant = parse_string(e.value);
    } else if (k == "plots") {
      cfg.plots = parse_bool(e.value, e.line, k);
    } else if (k == "out") {
      cfg.out = parse_string(e.value);
    } else if (k == "workers") {
      cfg.workers = static_cast<int>(parse_int(e.value, e.line, k));
    } else if (k.rfind("threshold.", 0) == 0) {
      const std::string name = k.substr(10);
      if (!cfg.thresholds.count(name)) {
        fail(e.line, "unknown threshold '" + name + "' for experiment '" + cfg.experiment + "'");
      }
      cfg.thresholds[name] = parse_real(e.value, e.line, k);
    } else {
      fail(e.line, "unknown key '" + k + "'");
    }
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void validate(const ExperimentConfig& cfg) {
  auto bad = [](const std::string& m) { throw ConfigError(m); };
  if (cfg.n.empty()) bad("n must list at least one size");
  if (!(cfg.C >= 0.0)) bad("C must be nonnegative");
  for (auto n : cfg.n) {
    if (n < 1) bad("n must be positive");
    if (static_cast<double>(n) < cfg.C * cfg.C * cfg.C * (1.0 - 1e-12)) {
      bad("n = " + std::to_string(n) + " is below C^3 = " + fmt(cfg.C * cfg.C * cfg.C));
    }
  }
  if (cfg.replicas < 1) bad("replicas must be at least 1");
  if (cfg.workers < 1) bad("workers must be at least 1");
  if (cfg.gamma && !(*cfg.gamma > 0.0 && *cfg.gamma < 2.0 / 3.0)) {
    bad("gamma must lie in (0, 2/3), got " + fmt(*cfg.gamma));
  }
  for (double rho : cfg.rho) {
    if (!(rho > 0.0 && rho < 1.0)) bad("rho must lie in (0, 1), got " + fmt(rho));
  }
  if (!(cfg.control_rho > 0.0 && cfg.control_rho < 1.0)) bad("control_rho must lie in (0, 1)");
  for (const auto* grid : {&cfg.u, &cfg.v, &cfg.x}) {
    for (double p : *grid) {
      if (std::abs(p) > cfg.C + 1e-12) bad("grid point " + fmt(p) + " outside [-C, C]");
    }
  }
  for (std::size_t q = 0; q < cfg.r.size(); ++q) {
    if (cfg.r[q] < 0.0 || (q > 0 && cfg.r[q] < cfg.r[q - 1])) {
      bad("r must be nonnegative and nondecreasing");
    }
  }
  if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0)) bad("epsilon must lie in (0, 1]");
  for (const auto& p : cfg.profiles) {
    try {
      profile_kind_from_string(p);
    } catch (const DomainError& e) {
      bad(e.what());
    }
  }
  if (cfg.variant != "local" && cfg.variant != "sources") bad("variant must be local or sources");
}

std::string serialize(const ExperimentConfig& cfg, bool include_execution) {
  std::string s;
  auto put = [&s](const char* key, const std::string& v) { s += std::string(key) + " = " + v + "\n"; };
  put("experiment", cfg.experiment);
  put("n", fmt_list(cfg.n));
  put("replicas", fmt(cfg.replicas));
  put("seed", std::to_string(cfg.seed));
  put("C", fmt(cfg.C));
  put("r", fmt_list(cfg.r));
  put("gamma", cfg.gamma ? fmt(*cfg.gamma) : "none");
  put("rho", fmt_list(cfg.rho));
  put("control_rho", fmt(cfg.control_rho));
  put("u", fmt_list(cfg.u));
  put("v", fmt_list(cfg.v));
  put("x", fmt_list(cfg.x));
  put("epsilon", fmt(cfg.epsilon));
  put("profiles", fmt_list(cfg.profiles));
  put("variant", cfg.variant);
  put("plots", cfg.plots ? "true" : "false");
  for (const auto& [name, value] : cfg.thresholds) s += "threshold." + name + " = " + fmt(value) + "\n";
  if (include_execution) {
    put("out", cfg.out);
    put("workers", std::to_string(cfg.workers));
  }
  return s;
}

std::string config_digest(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize(cfg, false)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace lpplab
