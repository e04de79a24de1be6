#include "lpplab/lpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "lpplab/errors.hpp"
#include "sweep.hpp"

namespace lpplab {

Frontier::Frontier(std::int64_t t, TargetBand band, std::vector<double> values,
                   std::vector<std::int64_t> exits)
    : t_(t), band_(band), values_(std::move(values)), exits_(std::move(exits)) {
  if (static_cast<std::int64_t>(values_.size()) != band_.size() || values_.size() != exits_.size()) {
    throw DomainError("Frontier: storage does not match the band");
  }
}

std::size_t Frontier::index(std::int64_t k) const {
  if (!band_.contains(k)) {
    throw DomainError("Frontier: target " + std::to_string(k) + " outside band [" +
                      std::to_string(band_.k_lo) + ", " + std::to_string(band_.k_hi) + "]");
  }
  return static_cast<std::size_t>(k - band_.k_lo);
}

ExtValue Frontier::value(std::int64_t k) const { return ExtValue{values_[index(k)]}; }

std::int64_t Frontier::exit(std::int64_t k) const {
  const std::size_t idx = index(k);
  if (ExtValue{values_[idx]}.is_bottom()) {
    throw NoPathError("Frontier: no path reaches target " + std::to_string(k));
  }
  return exits_[idx];
}

std::int64_t exit_point(const Frontier& f, std::int64_t k) { return f.exit(k); }

bool exits_monotone(const Frontier& f) {
  const auto vals = f.raw_values();
  const auto ex = f.raw_exits();
  bool have = false;
  std::int64_t last = 0;
  for (std::size_t p = 0; p < vals.size(); ++p) {
    if (ExtValue{vals[p]}.is_bottom()) continue;
    if (have && ex[p] < last) return false;
    last = ex[p];
    have = true;
  }
  return true;
}

void write_frontier_table(std::ostream& os, const Frontier& f) {
  os << "t\td\tvalue\texit\n";
  const auto vals = f.raw_values();
  const auto ex = f.raw_exits();
  const auto old_prec = os.precision(17);
  for (std::size_t p = 0; p < vals.size(); ++p) {
    const std::int64_t k = f.band().k_lo + static_cast<std::int64_t>(p);
    os << f.t() << '\t' << 2 * k << '\t' << ExtValue{vals[p]} << '\t';
    if (ExtValue{vals[p]}.is_bottom()) {
      os << "NA";
    } else {
      os << ex[p];
    }
    os << '\n';
  }
  os.precision(old_prec);
}

ProfileValue profile_lpp(const WeightField& w, const Profile& b, Site y) {
  if (y.time() < 1) throw DomainError("profile_lpp: target must satisfy i + j >= 1");
  const std::int64_t j_lo = -y.j;
  const std::int64_t j_hi = y.i;
  const auto lpp = lpp_from_boundary_sources(w, y, j_lo, j_hi);
  std::vector<double> bvals(lpp.size());
  b.fill(j_lo, std::span<double>(bvals));
  ProfileValue out;
  for (std::size_t p = 0; p < lpp.size(); ++p) {
    const ExtValue v = ExtValue{bvals[p]} + ExtValue{lpp[p]};
    if (v.is_bottom()) continue;
    if (out.value.is_bottom() || out.value <= v) {
      out.value = v;
      out.exit = j_lo + static_cast<std::int64_t>(p);
    }
  }
  return out;
}

std::optional<Site> Geodesic::at_time(std::int64_t t) const {
  if (sites.empty()) return std::nullopt;
  const std::int64_t t0 = sites.front().time();
  if (t < t0 || t > sites.back().time()) return std::nullopt;
  return sites[static_cast<std::size_t>(t - t0)];
}

double path_weight(const WeightField& w, const Geodesic& g) {
  double sum = 0.0;
  for (std::size_t p = 1; p < g.sites.size(); ++p) sum += w.weight_at(g.sites[p]);
  return sum;
}

std::optional<Site> crossing_site(const Geodesic& g1, const Geodesic& g2) {
  if (g1.sites.empty() || g2.sites.empty()) return std::nullopt;
  // Up-right paths visit each antidiagonal at most once, so a shared site
  // must appear at the same time index in both.
  const std::int64_t lo = std::max(g1.sites.front().time(), g2.sites.front().time());
  const std::int64_t hi = std::min(g1.sites.back().time(), g2.sites.back().time());
  for (std::int64_t t = lo; t <= hi; ++t) {
    const Site a = *g1.at_time(t);
    if (a == *g2.at_time(t)) return a;
  }
  return std::nullopt;
}

std::int64_t geodesic_midpoint(const WeightField& w, std::int64_t j, std::int64_t k, std::int64_t n,
                               std::int64_t m) {
  if (m < 0 || m > n) throw DomainError("geodesic_midpoint: requires 0 <= m <= n");
  const Site src = antidiagonal_site(j, 0);
  const Site dst = antidiagonal_site(k, n);
  if (!precedes(src, dst)) throw DomainError("geodesic_midpoint: requires [j]_0 <= [k]_n");
  if (m == 0) return j;
  if (m == n) return k;
  const Geodesic g = geodesic(w, src, dst);
  return g.at_time(2 * m)->diag() / 2;
}

MidpointModels midpoint_models(const RowFiller& rows, const WeightField& walk_field, double rho,
                               std::int64_t n, TargetBand targets, std::uint64_t lane_base) {
  if (n < 2) throw DomainError("midpoint_models: requires n >= 2");
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("midpoint_models: requires rho in (0,1)");
  if (targets.k_hi < targets.k_lo) throw DomainError("midpoint_models: empty target band");

  MidpointModels out;
  out.m = n / 2;
  out.n = n;
  out.rho = rho;
  const std::int64_t m = out.m;

  const Profile s1 = Profile::stationary(rho, WalkSource{walk_field, lane_base + 1});
  out.frontier1 =
      std::move(evolve_profiles(rows, std::span<const Profile>(&s1, 1), m, n, targets).front());

  // Reversed model: boundary s^2 on t = 2m, targets [k]_0 on t = 0.
  const StationaryWalk s2(rho, WalkSource{walk_field, lane_base + 2});
  const std::int64_t j_lo = targets.k_lo - m;
  const std::int64_t j_hi = targets.k_hi + m;
  const auto count = static_cast<std::size_t>(j_hi - j_lo + 1);
  std::vector<double> top(count), walk(count);
  std::vector<std::int64_t> labels(count);
  rows(m + j_lo, m - j_lo, std::span<double>(top));
  s2.fill(j_lo, std::span<double>(walk));
  for (std::size_t p = 0; p < count; ++p) {
    top[p] += walk[p];
    labels[p] = j_lo + static_cast<std::int64_t>(p);
  }
  auto res = detail::reverse_to_boundary(rows, 2 * m, 2 * j_lo, top, labels, 2 * targets.k_lo,
                                         2 * targets.k_hi);
  out.frontier2 = Frontier(0, targets, std::move(res.values), std::move(res.labels));
  return out;
}

MidpointModels midpoint_models(const WeightField& w, double rho, std::int64_t n, TargetBand targets,
                               std::uint64_t lane_base) {
  return midpoint_models(bulk_rows(w), w, rho, n, targets, lane_base);
}

double fp_slack(double scale, std::int64_t steps) noexcept {
  return 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(steps + 1) *
         std::abs(scale);
}

ComparisonAudit comparison_check(const Frontier& f1, const Frontier& f2, std::int64_t k,
                                 std::int64_t l, std::int64_t n) {
  if (k > l) throw DomainError("comparison_check: requires k <= l");
  ComparisonAudit a;
  a.k = k;
  a.l = l;
  a.n = n;
  a.exit1_l = f1.exit(l);
  a.exit2_k = f2.exit(k);
  const double v1l = f1.value(l).value(), v1k = f1.value(k).value();
  const double v2l = f2.value(l).value(), v2k = f2.value(k).value();
  a.increment1 = v1l - v1k;
  a.increment2 = v2l - v2k;
  const double scale = std::abs(v1l) + std::abs(v1k) + std::abs(v2l) + std::abs(v2k);
  a.tolerance = fp_slack(scale, 2 * n);
  a.hypothesis = a.exit1_l <= a.exit2_k;
  a.conclusion = a.increment1 <= a.increment2 + a.tolerance;
  return a;
}

ComparisonAudit comparison_check(const WeightField& w, const Profile& b1, const Profile& b2,
                                 std::int64_t k, std::int64_t l, std::int64_t n) {
  if (k > l) throw DomainError("comparison_check: requires k <= l");
  const Profile both[] = {b1, b2};
  const auto fronts = evolve_profiles(w, both, n, TargetBand{k, l});
  return comparison_check(fronts[0], fronts[1], k, l, n);
}

}  // namespace lpplab
