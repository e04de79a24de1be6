#include "lpplab/profiles.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "lpplab/errors.hpp"

namespace lpplab {

double ExtValue::value() const {
  if (is_bottom()) throw DomainError("ExtValue: bottom has no finite value");
  return v_;
}

std::ostream& operator<<(std::ostream& os, ExtValue v) {
  if (v.is_bottom()) return os << "-inf";
  return os << v.raw();
}

// ---------------------------------------------------------------------------
// StationaryWalk

StationaryWalk::StationaryWalk(double rho, WalkSource source)
    : rho_(rho), scale1_(1.0 / (2.0 * (1.0 - rho))), scale2_(1.0 / (2.0 * rho)),
      source_(source) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw DomainError("StationaryWalk: rho must lie in (0,1)");
  }
}

double StationaryWalk::increment(std::int64_t i) const noexcept {
  const auto [e1, e2] = source_.field.boundary_exp_pair(i, source_.lane);
  return e1 * scale1_ - e2 * scale2_;
}

void StationaryWalk::extend_to(std::int64_t k) const {
  if (k >= 0) {
    const auto need = static_cast<std::size_t>(k) + 1;
    pos_.reserve(need);
    while (pos_.size() < need) {
      const auto i = static_cast<std::int64_t>(pos_.size());
      pos_.push_back(pos_.back() + increment(i));
    }
  } else {
    const auto need = static_cast<std::size_t>(-k) + 1;
    neg_.reserve(need);
    while (neg_.size() < need) {
      // s(-m) = s(-m+1) - zeta_{-m+1}
      const auto m = static_cast<std::int64_t>(neg_.size());
      neg_.push_back(neg_.back() - increment(-m + 1));
    }
  }
}

double StationaryWalk::value(std::int64_t k) const {
  extend_to(k);
  return k >= 0 ? pos_[static_cast<std::size_t>(k)] : neg_[static_cast<std::size_t>(-k)];
}

void StationaryWalk::fill(std::int64_t k_lo, std::span<double> out) const {
  if (out.empty()) return;
  const std::int64_t k_hi = k_lo + static_cast<std::int64_t>(out.size()) - 1;
  extend_to(k_lo);
  extend_to(k_hi);
  for (std::size_t p = 0; p < out.size(); ++p) {
    const std::int64_t k = k_lo + static_cast<std::int64_t>(p);
    out[p] = k >= 0 ? pos_[static_cast<std::size_t>(k)] : neg_[static_cast<std::size_t>(-k)];
  }
}

// ---------------------------------------------------------------------------
// Profile kinds

std::string_view to_string(ProfileKind kind) noexcept {
  switch (kind) {
    case ProfileKind::Wedge: return "wedge";
    case ProfileKind::Flat: return "flat";
    case ProfileKind::Stationary: return "stationary";
    case ProfileKind::WedgeFlat: return "wedge-flat";
    case ProfileKind::WedgeStationary: return "wedge-stationary";
    case ProfileKind::FlatStationary: return "flat-stationary";
    case ProfileKind::Custom: return "custom";
  }
  return "?";
}

ProfileKind profile_kind_from_string(std::string_view name) {
  std::string norm;
  for (char c : name) {
    if (c == '_' || c == '-' || c == ' ') continue;
    norm.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (norm == "wedge" || norm == "w") return ProfileKind::Wedge;
  if (norm == "flat" || norm == "f") return ProfileKind::Flat;
  if (norm == "stationary" || norm == "s") return ProfileKind::Stationary;
  if (norm == "wedgeflat" || norm == "wf") return ProfileKind::WedgeFlat;
  if (norm == "wedgestationary" || norm == "ws") return ProfileKind::WedgeStationary;
  if (norm == "flatstationary" || norm == "fs") return ProfileKind::FlatStationary;
  if (norm == "custom") return ProfileKind::Custom;
  throw DomainError("unknown profile kind '" + std::string(name) + "'");
}

CustomTable CustomTable::parse(std::string_view text) {
  CustomTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string ks, vs, extra;
    if (!(fields >> ks)) continue;
    if (!(fields >> vs) || (fields >> extra)) {
      throw ConfigError("custom profile line " + std::to_string(lineno) +
                        ": expected two columns (k, value)");
    }
    std::int64_t k = 0;
    auto [kp, kec] = std::from_chars(ks.data(), ks.data() + ks.size(), k);
    if (kec != std::errc{} || kp != ks.data() + ks.size()) {
      throw ConfigError("custom profile line " + std::to_string(lineno) + ": bad index '" + ks + "'");
    }
    ExtValue v;
    if (vs == "-inf") {
      v = ExtValue::bottom();
    } else {
      double d = 0.0;
      auto [vp, vec] = std::from_chars(vs.data(), vs.data() + vs.size(), d);
      if (vec != std::errc{} || vp != vs.data() + vs.size() || !std::isfinite(d)) {
        throw ConfigError("custom profile line " + std::to_string(lineno) + ": bad value '" + vs + "'");
      }
      v = ExtValue{d};
    }
    if (!table.values.emplace(k, v).second) {
      throw ConfigError("custom profile line " + std::to_string(lineno) + ": duplicate index " + ks);
    }
  }
  auto zero = table.values.find(0);
  if (zero == table.values.end() || !(zero->second == ExtValue{0.0})) {
    throw ConfigError("custom profile: b(0) must be present and equal to 0");
  }
  return table;
}

CustomTable CustomTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open custom profile table '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

Profile Profile::wedge() { return Profile(ProfileKind::Wedge, nullptr, nullptr); }
Profile Profile::flat() { return Profile(ProfileKind::Flat, nullptr, nullptr); }
Profile Profile::wedge_flat() { return Profile(ProfileKind::WedgeFlat, nullptr, nullptr); }

Profile Profile::stationary(double rho, WalkSource source) {
  return Profile(ProfileKind::Stationary, std::make_shared<StationaryWalk>(rho, source), nullptr);
}
Profile Profile::wedge_stationary(double rho, WalkSource source) {
  return Profile(ProfileKind::WedgeStationary, std::make_shared<StationaryWalk>(rho, source), nullptr);
}
Profile Profile::flat_stationary(double rho, WalkSource source) {
  return Profile(ProfileKind::FlatStationary, std::make_shared<StationaryWalk>(rho, source), nullptr);
}
Profile Profile::custom(CustomTable table) {
  return Profile(ProfileKind::Custom, nullptr, std::make_shared<CustomTable>(std::move(table)));
}

Profile Profile::make(ProfileKind kind, double rho, WalkSource source) {
  switch (kind) {
    case ProfileKind::Wedge: return wedge();
    case ProfileKind::Flat: return flat();
    case ProfileKind::Stationary: return stationary(rho, source);
    case ProfileKind::WedgeFlat: return wedge_flat();
    case ProfileKind::WedgeStationary: return wedge_stationary(rho, source);
    case ProfileKind::FlatStationary: return flat_stationary(rho, source);
    case ProfileKind::Custom: break;
  }
  throw DomainError("Profile::make: custom profiles need a table");
}

const StationaryWalk& Profile::walk() const {
  if (!walk_) throw DomainError("profile '" + std::string(to_string(kind_)) + "' has no stationary part");
  return *walk_;
}

double Profile::rho() const noexcept { return walk_ ? walk_->rho() : 0.5; }

ExtValue Profile::value(std::int64_t k) const {
  constexpr ExtValue bot = ExtValue::bottom();
  switch (kind_) {
    case ProfileKind::Wedge: return k == 0 ? ExtValue{0.0} : bot;
    case ProfileKind::Flat: return ExtValue{0.0};
    case ProfileKind::Stationary: return ExtValue{walk_->value(k)};
    case ProfileKind::WedgeFlat: return k < 0 ? bot : ExtValue{0.0};
    case ProfileKind::WedgeStationary: return k < 0 ? bot : ExtValue{walk_->value(k)};
    case ProfileKind::FlatStationary: return k <= 0 ? ExtValue{0.0} : ExtValue{walk_->value(k)};
    case ProfileKind::Custom: {
      auto it = table_->values.find(k);
      return it == table_->values.end() ? bot : it->second;
    }
  }
  return bot;
}

void Profile::fill(std::int64_t k_lo, std::span<double> out) const {
  const double bot = ExtValue::bottom().raw();
  const std::int64_t count = static_cast<std::int64_t>(out.size());
  switch (kind_) {
    case ProfileKind::Stationary:
      walk_->fill(k_lo, out);
      return;
    case ProfileKind::WedgeStationary:
    case ProfileKind::FlatStationary: {
      const std::int64_t k_hi = k_lo + count - 1;
      if (k_hi > 0) walk_->value(k_hi);
      for (std::int64_t p = 0; p < count; ++p) {
        const std::int64_t k = k_lo + p;
        if (k < 0) {
          out[p] = kind_ == ProfileKind::WedgeStationary ? bot : 0.0;
        } else {
          out[p] = k == 0 ? 0.0 : walk_->value(k);
        }
      }
      return;
    }
    default:
      for (std::int64_t p = 0; p < count; ++p) out[p] = value(k_lo + p).raw();
      return;
  }
}

std::pair<std::int64_t, std::int64_t> Profile::support_hint() const noexcept {
  constexpr auto lo = std::numeric_limits<std::int64_t>::min();
  constexpr auto hi = std::numeric_limits<std::int64_t>::max();
  switch (kind_) {
    case ProfileKind::Wedge: return {0, 0};
    case ProfileKind::WedgeFlat:
    case ProfileKind::WedgeStationary: return {0, hi};
    case ProfileKind::Custom: {
      std::int64_t first = hi, last = lo;
      for (const auto& [k, v] : table_->values) {
        if (v.is_finite()) {
          first = std::min(first, k);
          last = std::max(last, k);
        }
      }
      return {first, last};
    }
    default: return {lo, hi};
  }
}

ExtValue profile_value(const Profile& p, std::int64_t k) { return p.value(k); }

double stationary_value(const StationaryWalk& walk, std::int64_t k) { return walk.value(k); }

std::pair<double, double> coupled_stationary_values(double rho, std::int64_t k,
                                                    const WalkSource& source) {
  const StationaryWalk half(0.5, source);
  const StationaryWalk tilted(rho, source);
  return {half.value(k), tilted.value(k)};
}

// ---------------------------------------------------------------------------
// Closed forms

Characteristics characteristics(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("characteristics: rho must lie in (0,1)");
  Characteristics c;
  c.mu = (2.0 * rho - 1.0) / (rho * (1.0 - rho));
  const double ratio = (1.0 - rho) / rho;
  c.a = ratio * ratio;
  c.b = (c.a - 1.0) / (c.a + 1.0);
  return c;
}

double rho_n(double r, std::int64_t n, int sign) {
  if (n < 1) throw DomainError("rho_n: n must be positive");
  if (sign != 1 && sign != -1) throw DomainError("rho_n: sign must be +1 or -1");
  const double rho = 0.5 + sign * r / std::cbrt(static_cast<double>(n));
  if (!(rho >= 0.25 && rho <= 0.75)) {
    throw DomainError("rho_n: 1/2 " + std::string(sign > 0 ? "+" : "-") + " r n^{-1/3} = " +
                      std::to_string(rho) + " lies outside [1/4, 3/4] (r=" + std::to_string(r) +
                      ", n=" + std::to_string(n) + ")");
  }
  return rho;
}

MinWalkStats min_walk_stats(double rho) {
  if (!(rho > 0.5 && rho < 1.0)) {
    throw DomainError("min_walk_stats: rho must lie in (1/2, 1)");
  }
  const double drift = 2.0 * rho - 1.0;
  const double q = (1.0 - rho) / rho;
  return MinWalkStats{-q / drift, (2.0 * q - q * q) / (drift * drift)};
}

}  // namespace lpplab
