#pragma once

// Last-passage percolation engine.
//
// Coordinates: antidiagonal time t = i + j and diagonal d = i - j. The target
// [k]_n = (n + k, n - k) sits at t = 2n, d = 2k; boundary point k is (k, -k).
// Path weights exclude the source and include the target.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "lpplab/env.hpp"
#include "lpplab/profiles.hpp"

namespace lpplab {

/// Supplies weights of the consecutive sites (i0 + p, j0 - p). The engine
/// asks for each antidiagonal run exactly once per sweep, which makes
/// instrumentation (recording the queried sites) straightforward.
using RowFiller = std::function<void(std::int64_t i0, std::int64_t j0, std::span<double> out)>;

RowFiller bulk_rows(const WeightField& w);

struct TargetBand {
  std::int64_t k_lo = 0;
  std::int64_t k_hi = 0;

  std::int64_t size() const noexcept { return k_hi - k_lo + 1; }
  bool contains(std::int64_t k) const noexcept { return k >= k_lo && k <= k_hi; }
};

/// Values and rightmost exit labels of L^b along one antidiagonal.
class Frontier {
 public:
  Frontier() = default;
  Frontier(std::int64_t t, TargetBand band, std::vector<double> values,
           std::vector<std::int64_t> exits);

  /// Antidiagonal time of the stored row.
  std::int64_t t() const noexcept { return t_; }
  TargetBand band() const noexcept { return band_; }
  /// Diagonal coordinate range d = i - j of the stored cells (t is even).
  std::int64_t d_lo() const noexcept { return 2 * band_.k_lo; }
  std::int64_t d_hi() const noexcept { return 2 * band_.k_hi; }

  bool contains(std::int64_t k) const noexcept { return band_.contains(k); }
  ExtValue value(std::int64_t k) const;
  /// Rightmost maximizing boundary index. Throws NoPathError when the value
  /// at k is bottom and DomainError when k is outside the band.
  std::int64_t exit(std::int64_t k) const;

  std::span<const double> raw_values() const noexcept { return values_; }
  std::span<const std::int64_t> raw_exits() const noexcept { return exits_; }

 private:
  std::size_t index(std::int64_t k) const;

  std::int64_t t_ = 0;
  TargetBand band_{};
  std::vector<double> values_;
  std::vector<std::int64_t> exits_;
};

/// L^b[k]_n for all k in `targets`, with rightmost exit points. Exact: the
/// sweep covers the full dependence cone, so infinite profiles need only
/// finite work. Throws DomainError if n < 1 or the band is empty, and
/// NoPathError if b is bottom on the whole feasible boundary range.
Frontier evolve_profile(const WeightField& w, const Profile& p, std::int64_t n, TargetBand targets);

/// Several profiles on the same environment (basic coupling) in one sweep.
std::vector<Frontier> evolve_profiles(const WeightField& w, std::span<const Profile> profiles,
                                      std::int64_t n, TargetBand targets);

/// General form: the boundary sits on antidiagonal t = 2 * origin_half_time
/// with boundary index j at site (m + j, m - j); targets at t = 2n.
std::vector<Frontier> evolve_profiles(const RowFiller& rows, std::span<const Profile> profiles,
                                      std::int64_t origin_half_time, std::int64_t n,
                                      TargetBand targets);

std::int64_t exit_point(const Frontier& f, std::int64_t k);

/// True when exits are nondecreasing in k among finite entries.
bool exits_monotone(const Frontier& f);

/// Text table with columns t, d, value, exit (value "-inf" for bottom).
void write_frontier_table(std::ostream& os, const Frontier& f);

enum class Direction { forward, reverse };

/// L(x, y) excluding w_x and including w_y. Throws DomainError unless x <= y.
double point_lpp(const WeightField& w, Site x, Site y, Direction direction = Direction::forward);

/// L((a,-a) ... ) batch: for one target y, L((j,-j), y) for j in [j_lo, j_hi]
/// from a single backward sweep. Entries for sources not below y are bottom.
std::vector<double> lpp_from_boundary_sources(const RowFiller& rows, Site target,
                                              std::int64_t j_lo, std::int64_t j_hi);
std::vector<double> lpp_from_boundary_sources(const WeightField& w, Site target,
                                              std::int64_t j_lo, std::int64_t j_hi);

struct ProfileValue {
  ExtValue value;
  std::int64_t exit = 0;  ///< rightmost maximizer; meaningless when value is bottom
};

/// L^b(y) and Z^b(y) for an arbitrary site y with i + j >= 1 (odd times
/// included), from one backward sweep over the feasible sources.
ProfileValue profile_lpp(const WeightField& w, const Profile& b, Site y);

struct Geodesic {
  std::vector<Site> sites;  ///< source first, target last

  Site source() const { return sites.front(); }
  Site target() const { return sites.back(); }
  /// Site of the path on antidiagonal t, if the path reaches it.
  std::optional<Site> at_time(std::int64_t t) const;
};

/// A maximizing path from x to y. Ties prefer the step from the larger-i
/// predecessor. Throws DomainError unless x <= y.
Geodesic geodesic(const WeightField& w, Site x, Site y);

/// Weight of a path excluding its source.
double path_weight(const WeightField& w, const Geodesic& g);

/// First common site in path order, if any.
std::optional<Site> crossing_site(const Geodesic& g1, const Geodesic& g2);

/// Z_m^j[k]_n: diagonal index z such that the geodesic from [j]_0 to [k]_n
/// passes through (m + z, m - z). Requires 0 <= m <= n and [j]_0 <= [k]_n.
std::int64_t geodesic_midpoint(const WeightField& w, std::int64_t j, std::int64_t k,
                               std::int64_t n, std::int64_t m);

/// Forward model L_m^{rho,1} from the boundary t = 2m to t = 2n, and the
/// reversed model L_m^{rho,2} from t = 2m down to the targets [k]_0.
struct MidpointModels {
  std::int64_t m = 0;
  std::int64_t n = 0;
  double rho = 0.5;
  Frontier frontier1;  ///< row t = 2n, exits are boundary indices on t = 2m
  Frontier frontier2;  ///< row t = 0, exits are boundary indices on t = 2m
};

/// Boundary walks use lanes lane_base + 1 (s^1) and lane_base + 2 (s^2).
MidpointModels midpoint_models(const WeightField& w, double rho, std::int64_t n, TargetBand targets,
                               std::uint64_t lane_base = 16);
MidpointModels midpoint_models(const RowFiller& rows, const WeightField& walk_field, double rho,
                               std::int64_t n, TargetBand targets, std::uint64_t lane_base = 16);

/// Outcome of one local-comparison check on a shared environment.
struct ComparisonAudit {
  std::int64_t k = 0;
  std::int64_t l = 0;
  std::int64_t n = 0;
  std::int64_t exit1_l = 0;  ///< Z^{b1}[l]_n
  std::int64_t exit2_k = 0;  ///< Z^{b2}[k]_n
  double increment1 = 0.0;   ///< L^{b1}[l] - L^{b1}[k]
  double increment2 = 0.0;   ///< L^{b2}[l] - L^{b2}[k]
  double tolerance = 0.0;    ///< floating-point slack used for the conclusion
  bool hypothesis = false;   ///< Z^{b1}[l] <= Z^{b2}[k]
  bool conclusion = false;   ///< increment1 <= increment2 (+ tolerance)
  bool violation() const noexcept { return hypothesis && !conclusion; }
};

/// Rounding slack for comparing differences of LPP values whose magnitudes
/// are bounded by `scale` and which accumulate along paths of `steps` steps.
double fp_slack(double scale, std::int64_t steps) noexcept;

ComparisonAudit comparison_check(const WeightField& w, const Profile& b1, const Profile& b2,
                                 std::int64_t k, std::int64_t l, std::int64_t n);
/// Same check on precomputed frontiers that contain k and l.
ComparisonAudit comparison_check(const Frontier& f1, const Frontier& f2, std::int64_t k,
                                 std::int64_t l, std::int64_t n);

}  // namespace lpplab
