#include "lpplab/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "lpplab/errors.hpp"
#include "lpplab/stats.hpp"

namespace lpplab {

namespace {

constexpr double kTwo32 = 2.8284271247461900976;   // 2^{3/2}
constexpr double kTwo43 = 2.5198420997897463295;   // 2^{4/3}
constexpr double kTwo23 = 1.5874010519681994748;   // 2^{2/3}
constexpr double kTwo16 = 1.1224620483093729814;   // 2^{1/6}
constexpr double kFloorGuard = 1e-9;

double finite_at(const Frontier& f, std::int64_t k, const char* who) {
  if (!f.contains(k)) {
    throw DomainError(std::string(who) + ": offset " + std::to_string(k) +
                      " outside the frontier band [" + std::to_string(f.band().k_lo) + ", " +
                      std::to_string(f.band().k_hi) + "]");
  }
  const ExtValue v = f.value(k);
  if (v.is_bottom()) throw NoPathError(std::string(who) + ": no path to offset " + std::to_string(k));
  return v.raw();
}

double max_abs(const Frontier& f) {
  double m = 0.0;
  for (double x : f.raw_values()) {
    if (std::isfinite(x)) m = std::max(m, std::abs(x));
  }
  return m;
}

}  // namespace

std::int64_t scaled_floor(double x, std::int64_t n, double exponent) {
  const double base = exponent == 2.0 / 3.0 ? n_two_thirds(n)
                                            : std::pow(static_cast<double>(n), exponent);
  return static_cast<std::int64_t>(std::floor(x * base + kFloorGuard));
}

double n_two_thirds(std::int64_t n) {
  const double c = std::cbrt(static_cast<double>(n));
  return c * c;
}

UGrid UGrid::make(double C, std::vector<double> points, std::int64_t n) {
  if (!(C >= 0.0)) throw DomainError("UGrid: C must be nonnegative");
  if (n < 1) throw DomainError("UGrid: n must be positive");
  if (static_cast<double>(n) < C * C * C * (1.0 - 1e-12)) {
    throw DomainError("UGrid: requires n >= C^3 (n=" + std::to_string(n) +
                      ", C=" + std::to_string(C) + ")");
  }
  for (std::size_t q = 0; q < points.size(); ++q) {
    if (!(std::abs(points[q]) <= C + 1e-12)) {
      throw DomainError("UGrid: point " + std::to_string(points[q]) + " outside [-C, C]");
    }
    if (q > 0 && !(points[q] > points[q - 1])) {
      throw DomainError("UGrid: points must be strictly increasing");
    }
  }
  UGrid g;
  g.C = C;
  g.points = std::move(points);
  g.n = n;
  return g;
}

UGrid UGrid::integer(double C, std::int64_t n) {
  const double n23 = n_two_thirds(n);
  const std::int64_t K = scaled_floor(C, n);
  std::vector<double> pts;
  for (std::int64_t k = 0; k <= K; ++k) pts.push_back(static_cast<double>(k) / n23);
  return make(C, std::move(pts), n);
}

std::vector<std::int64_t> UGrid::offsets(double stretch) const {
  std::vector<std::int64_t> out;
  out.reserve(points.size());
  for (double u : points) out.push_back(offset(u, stretch));
  return out;
}

TargetBand UGrid::band(double stretch) const {
  TargetBand b{0, 0};
  for (std::int64_t k : offsets(stretch)) {
    b.k_lo = std::min(b.k_lo, k);
    b.k_hi = std::max(b.k_hi, k);
  }
  return b;
}

UGrid UGrid::snapped() const {
  const double n23 = n_two_thirds(n);
  std::vector<double> pts;
  for (std::int64_t k : offsets()) {
    const double u = static_cast<double>(k) / n23;
    if (pts.empty() || u > pts.back()) pts.push_back(u);
  }
  UGrid g = *this;
  g.points = std::move(pts);
  return g;
}

ProcessSample delta_n(const Frontier& f, std::int64_t n, const UGrid& g) {
  ProcessSample s;
  s.u = g.points;
  const double base = finite_at(f, 0, "delta_n");
  const double scale = kTwo32 * std::cbrt(static_cast<double>(n));
  for (std::int64_t k : g.offsets()) s.values.push_back((finite_at(f, k, "delta_n") - base) / scale);
  return s;
}

ProcessSample sub_kpz_delta(const Frontier& f, std::int64_t n, double gamma, const UGrid& g) {
  if (!(gamma > 0.0 && gamma < 2.0 / 3.0)) {
    throw DomainError("sub_kpz_delta: gamma must lie in (0, 2/3), got " + std::to_string(gamma));
  }
  ProcessSample s;
  s.u = g.points;
  const double base = finite_at(f, 0, "sub_kpz_delta");
  const double scale = kTwo32 * std::pow(static_cast<double>(n), gamma / 2.0);
  for (double u : g.points) {
    const std::int64_t k = scaled_floor(u, n, gamma);
    s.values.push_back((finite_at(f, k, "sub_kpz_delta") - base) / scale);
  }
  return s;
}

double airy_centering(AiryKind) noexcept { return 4.0; }

AirySample airy_from_frontier(const Frontier& f, AiryKind kind, std::int64_t n, const UGrid& g) {
  AirySample out;
  out.H.u = g.points;
  out.delta.u = g.points;
  const double n13 = std::cbrt(static_cast<double>(n));
  const double center = airy_centering(kind) * static_cast<double>(n);
  const double base = finite_at(f, 0, "airy_point_process");
  const double H0 = (base - center) / (kTwo43 * n13);
  for (std::int64_t k : g.offsets(kTwo23)) {
    const double L = finite_at(f, k, "airy_point_process");
    const double H = (L - center) / (kTwo43 * n13);
    const double D = (L - base) / (kTwo32 * n13);
    out.H.values.push_back(H);
    out.delta.values.push_back(D);
    out.identity_residual = std::max(out.identity_residual, std::abs(H - H0 - kTwo16 * D));
  }
  return out;
}

AirySample airy_point_process(AiryKind kind, const WeightField& w, std::int64_t n, const UGrid& g) {
  const Profile p = kind == AiryKind::wedge ? Profile::wedge() : Profile::flat();
  const Frontier f = evolve_profile(w, p, n, g.band(kTwo23));
  auto s = airy_from_frontier(f, kind, n, g);
  s.H.replica = s.delta.replica = w.replica_id();
  return s;
}

SheetSample sheet_sample(const WeightField& w, std::int64_t n, const std::vector<double>& u,
                         const std::vector<double>& v, double C) {
  const UGrid gu = UGrid::make(C, u, n);
  const UGrid gv = UGrid::make(C, v, n);
  for (double x : u) {
    if (x < 0) throw DomainError("sheet_sample: grid must lie in [0, C]");
  }
  for (double x : v) {
    if (x < 0) throw DomainError("sheet_sample: grid must lie in [0, C]");
  }
  const auto au = gu.offsets(), as = gu.offsets(kTwo23);
  const auto bv = gv.offsets(), bs = gv.offsets(kTwo23);

  std::int64_t j_lo = 0, j_hi = 0;
  for (auto j : au) j_lo = std::min(j_lo, j), j_hi = std::max(j_hi, j);
  for (auto j : as) j_lo = std::min(j_lo, j), j_hi = std::max(j_hi, j);

  // L([j]_0, [k]_n) for every needed target k, all sources j in one sweep each.
  std::map<std::int64_t, std::vector<double>> by_target;
  auto need = [&](std::int64_t k) {
    if (!by_target.count(k)) {
      by_target.emplace(k, lpp_from_boundary_sources(w, antidiagonal_site(k, n), j_lo, j_hi));
    }
  };
  need(0);
  for (auto k : bv) need(k);
  for (auto k : bs) need(k);
  auto L = [&](std::int64_t j, std::int64_t k) {
    const double x = by_target.at(k)[static_cast<std::size_t>(j - j_lo)];
    if (!std::isfinite(x)) throw NoPathError("sheet_sample: source not below target");
    return x;
  };

  SheetSample s;
  s.replica = w.replica_id();
  s.u = u;
  s.v = v;
  const double n13 = std::cbrt(static_cast<double>(n));
  const double L00 = L(0, 0);
  const double H00 = (L00 - 4.0 * static_cast<double>(n)) / (kTwo43 * n13);
  for (std::size_t a = 0; a < u.size(); ++a) {
    for (std::size_t b = 0; b < v.size(); ++b) {
      const double drift = (v[b] - u[a]) * (v[b] - u[a]);
      s.delta.push_back((L(au[a], bv[b]) - L00) / (kTwo32 * n13));
      const double Ls = L(as[a], bs[b]);
      const double H =
          (Ls - 4.0 * static_cast<double>(n) + kTwo43 * drift * n13) / (kTwo43 * n13);
      s.H.push_back(H);
      const double D_stretched = (Ls - L00) / (kTwo32 * n13);
      s.identity_residual =
          std::max(s.identity_residual, std::abs(H - H00 - kTwo16 * D_stretched - drift));
    }
  }
  return s;
}

ProcessSample bridge_from_frontier(const Frontier& f, double rho, std::int64_t n, const UGrid& g) {
  const double mu = characteristics(rho).mu;
  ProcessSample s;
  s.u = g.points;
  const double base = finite_at(f, 0, "stationary_bridge");
  const double scale = kTwo32 * std::cbrt(static_cast<double>(n));
  for (std::int64_t k : g.offsets()) {
    s.values.push_back((finite_at(f, k, "stationary_bridge") - base - mu * static_cast<double>(k)) /
                       scale);
  }
  return s;
}

ProcessSample stationary_bridge(const WeightField& w, double rho, std::int64_t n, const UGrid& g,
                                std::uint64_t lane) {
  if (!(rho >= 0.25 && rho <= 0.75)) {
    throw DomainError("stationary_bridge: rho must lie in [1/4, 3/4], got " + std::to_string(rho));
  }
  const Frontier f = evolve_profile(w, Profile::stationary(rho, WalkSource{w, lane}), n, g.band());
  auto s = bridge_from_frontier(f, rho, n, g);
  s.replica = w.replica_id();
  return s;
}

std::string_view to_string(SandwichVariant v) noexcept {
  return v == SandwichVariant::local ? "local" : "sources";
}

namespace {

struct IncrementAudit {
  std::int64_t pairs = 0;
  std::int64_t violations = 0;
  double worst = 0.0;

  // lo[v]-lo[u] <= mid[v]-mid[u] <= hi[v]-hi[u] for all u <= v.
  void run(const std::vector<double>& lo, const std::vector<double>& mid,
           const std::vector<double>& hi, double slack) {
    const std::size_t K = mid.size();
    for (std::size_t a = 0; a < K; ++a) {
      for (std::size_t b = a; b < K; ++b) {
        const double dl = lo[b] - lo[a], dm = mid[b] - mid[a], dh = hi[b] - hi[a];
        ++pairs;
        const double excess = std::max(dl - dm, dm - dh);
        if (excess > slack) {
          ++violations;
          worst = std::max(worst, excess - slack);
        }
      }
    }
  }
};

std::vector<double> frontier_row(const Frontier& f, std::int64_t K, const char* who) {
  std::vector<double> out;
  for (std::int64_t k = 0; k <= K; ++k) out.push_back(finite_at(f, k, who));
  return out;
}

// W(δ) bound on the integer grid k / n^{2/3}: returns (#checks, #violations).
std::pair<int, int> modulus_audit(const std::vector<double>& pts, const std::vector<double>& Lb,
                                  const std::vector<double>& Lm, const std::vector<double>& Lp,
                                  double mu_m, double mu_p, double scale, double r, double C,
                                  const std::vector<double>& deltas, double slack) {
  const std::size_t K = pts.size();
  std::vector<double> D(K), Bm(K), Bp(K);
  for (std::size_t k = 0; k < K; ++k) {
    D[k] = (Lb[k] - Lb[0]) / scale;
    Bm[k] = (Lm[k] - Lm[0] - mu_m * static_cast<double>(k)) / scale;
    Bp[k] = (Lp[k] - Lp[0] - mu_p * static_cast<double>(k)) / scale;
  }
  int checks = 0, bad = 0;
  for (double frac : deltas) {
    const double delta = frac * C;
    const double lhs = modulus(pts, D, delta);
    const double rhs = std::max(modulus(pts, Bm, delta), modulus(pts, Bp, delta)) +
                       3.0 * std::sqrt(2.0) * delta * r;
    ++checks;
    if (lhs > rhs + slack / scale) ++bad;
  }
  return {checks, bad};
}

}  // namespace

SandwichRecord sandwich_event(const WeightField& w, const Profile& b, double r, double C,
                              std::int64_t n, const SandwichOptions& opt) {
  SandwichRecord rec;
  rec.r = r;
  rec.C = C;
  rec.n = n;
  rec.variant = opt.variant;
  rec.rho_minus = rho_n(r, n, -1);
  rec.rho_plus = rho_n(r, n, +1);
  const UGrid grid = UGrid::integer(C, n);
  const std::int64_t K = static_cast<std::int64_t>(grid.points.size()) - 1;
  const double scale = kTwo32 * std::cbrt(static_cast<double>(n));
  const double mu_m = characteristics(rec.rho_minus).mu;
  const double mu_p = characteristics(rec.rho_plus).mu;

  const WalkSource src{w, opt.lane};
  std::vector<Profile> profiles{Profile::stationary(rec.rho_minus, src),
                                Profile::stationary(rec.rho_plus, src)};
  if (opt.variant == SandwichVariant::local) profiles.push_back(b);
  const auto fr = evolve_profiles(w, profiles, n, TargetBand{0, K});
  rec.z_minus_C = fr[0].exit(K);
  rec.z_plus_0 = fr[1].exit(0);

  const auto Lm = frontier_row(fr[0], K, "sandwich_event");
  const auto Lp = frontier_row(fr[1], K, "sandwich_event");
  double mag = std::max(max_abs(fr[0]), max_abs(fr[1]));

  if (opt.variant == SandwichVariant::local) {
    rec.z_b_0 = fr[2].exit(0);
    rec.z_b_C = fr[2].exit(K);
    rec.event = rec.z_minus_C <= rec.z_b_0 && rec.z_b_C <= rec.z_plus_0;
    if (!rec.event) return rec;
    const auto Lb = frontier_row(fr[2], K, "sandwich_event");
    mag = std::max(mag, max_abs(fr[2]));
    const double slack = fp_slack(4.0 * mag, 2 * n);
    IncrementAudit audit;
    audit.run(Lm, Lb, Lp, slack);
    rec.pairs_checked = audit.pairs;
    rec.violations = audit.violations;
    rec.worst_excess = audit.worst;
    const auto [checks, bad] =
        modulus_audit(grid.points, Lb, Lm, Lp, mu_m, mu_p, scale, r, C, opt.deltas, slack);
    rec.modulus_checks = checks;
    rec.modulus_violations = bad;
    return rec;
  }

  // Sources variant: point-to-point models L_j, j in [0, K].
  rec.event = rec.z_minus_C <= 0 &&
              static_cast<double>(rec.z_plus_0) >= C * n_two_thirds(n) - kFloorGuard;
  if (!rec.event) return rec;
  std::vector<std::vector<double>> by_target;  // [k][j]
  for (std::int64_t k = 0; k <= K; ++k) {
    by_target.push_back(lpp_from_boundary_sources(w, antidiagonal_site(k, n), 0, K));
  }
  IncrementAudit audit;
  for (std::int64_t j = 0; j <= K; ++j) {
    std::vector<double> Lj;
    for (std::int64_t k = 0; k <= K; ++k) Lj.push_back(by_target[k][j]);
    for (double x : Lj) mag = std::max(mag, std::abs(x));
    const double slack = fp_slack(4.0 * mag, 2 * n);
    audit.run(Lm, Lj, Lp, slack);
    const auto [checks, bad] =
        modulus_audit(grid.points, Lj, Lm, Lp, mu_m, mu_p, scale, r, C, opt.deltas, slack);
    rec.modulus_checks += checks;
    rec.modulus_violations += bad;
  }
  rec.pairs_checked = audit.pairs;
  rec.violations = audit.violations;
  rec.worst_excess = audit.worst;
  return rec;
}

MidpointSandwichRecord midpoint_sandwich(const WeightField& w, double r, std::int64_t n,
                                         const std::vector<std::int64_t>& sources,
                                         const std::vector<std::int64_t>& targets,
                                         std::uint64_t lane_base) {
  if (n < 2) throw DomainError("midpoint_sandwich: requires n >= 2");
  MidpointSandwichRecord rec;
  rec.r = r;
  rec.n = n;
  rec.m = n / 2;
  rec.A = scaled_floor(1.0, n);
  const double rho_m = rho_n(r, n, -1);
  const double rho_p = rho_n(r, n, +1);
  for (auto x : sources) {
    if (x < 0 || x > rec.A) throw DomainError("midpoint_sandwich: source offset outside [0, A]");
  }
  for (std::size_t q = 0; q < targets.size(); ++q) {
    if (targets[q] < 0 || targets[q] > rec.A) {
      throw DomainError("midpoint_sandwich: target offset outside [0, A]");
    }
    if (q > 0 && targets[q] <= targets[q - 1]) {
      throw DomainError("midpoint_sandwich: targets must be strictly increasing");
    }
  }

  // Same s^1 lane as midpoint_models, so these are its forward models.
  const WalkSource s1{w, lane_base + 1};
  const Profile both[] = {Profile::stationary(rho_m, s1), Profile::stationary(rho_p, s1)};
  const auto fr = evolve_profiles(bulk_rows(w), both, rec.m, n, TargetBand{0, rec.A});
  rec.z_minus_A = fr[0].exit(rec.A);
  rec.z_plus_0 = fr[1].exit(0);
  rec.z0_0 = geodesic_midpoint(w, 0, 0, n, rec.m);
  rec.zA_A = geodesic_midpoint(w, rec.A, rec.A, n, rec.m);
  rec.event = rec.z_minus_A <= rec.z0_0 && rec.zA_A <= rec.z_plus_0;
  if (!rec.event || sources.empty() || targets.empty()) return rec;

  std::int64_t j_lo = sources.front(), j_hi = sources.front();
  for (auto j : sources) j_lo = std::min(j_lo, j), j_hi = std::max(j_hi, j);
  std::vector<double> Lm, Lp;
  std::vector<std::vector<double>> by_target;
  double mag = std::max(max_abs(fr[0]), max_abs(fr[1]));
  for (auto k : targets) {
    Lm.push_back(finite_at(fr[0], k, "midpoint_sandwich"));
    Lp.push_back(finite_at(fr[1], k, "midpoint_sandwich"));
    by_target.push_back(lpp_from_boundary_sources(w, antidiagonal_site(k, n), j_lo, j_hi));
  }
  IncrementAudit audit;
  for (auto j : sources) {
    std::vector<double> Lj;
    for (const auto& row : by_target) Lj.push_back(row[static_cast<std::size_t>(j - j_lo)]);
    for (double x : Lj) mag = std::max(mag, std::abs(x));
    audit.run(Lm, Lj, Lp, fp_slack(4.0 * mag, 2 * n));
  }
  rec.pairs_checked = audit.pairs;
  rec.violations = audit.violations;
  rec.worst_excess = audit.worst;
  return rec;
}

}  // namespace lpplab
