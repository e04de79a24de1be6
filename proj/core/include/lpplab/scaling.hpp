#pragma once

// Rescaled fluctuation processes and the exit-point comparison events.
//
// All processes are evaluated at floored integer offsets ⌊u n^{2/3}⌋ so that
// algebraic identities between them hold up to rounding only.

#include <cstdint>
#include <string_view>
#include <vector>

#include "lpplab/lpp.hpp"

namespace lpplab {

/// ⌊x n^e⌋, robust to the representation error of n^e at exact integers
/// (512^{2/3} = 64 must not floor to 63).
std::int64_t scaled_floor(double x, std::int64_t n, double exponent = 2.0 / 3.0);

/// n^{2/3} as used by the offset map.
double n_two_thirds(std::int64_t n);

struct UGrid {
  double C = 1.0;
  std::vector<double> points;  ///< strictly increasing, within [-C, C]
  std::int64_t n = 1;

  /// Validates n >= C^3, ordering and range. Throws DomainError.
  static UGrid make(double C, std::vector<double> points, std::int64_t n);
  /// Every offset 0..⌊C n^{2/3}⌋ as a grid point k / n^{2/3}.
  static UGrid integer(double C, std::int64_t n);

  std::int64_t offset(double u, double stretch = 1.0) const {
    return scaled_floor(stretch * u, n);
  }
  std::vector<std::int64_t> offsets(double stretch = 1.0) const;
  /// Smallest target band containing 0 and every (stretched) offset.
  TargetBand band(double stretch = 1.0) const;
  /// Grid with each point moved to its offset's left endpoint k / n^{2/3}
  /// (duplicates merged).
  UGrid snapped() const;
};

struct ProcessSample {
  std::uint64_t replica = 0;
  std::vector<double> u;
  std::vector<double> values;
};

/// Δ_n(u) = (L[u n^{2/3}] - L[0]) / (2^{3/2} n^{1/3}).
ProcessSample delta_n(const Frontier& f, std::int64_t n, const UGrid& g);

/// Δ_{γ,n}(u) = (L[u n^γ] - L[0]) / (2^{3/2} n^{γ/2}); γ in (0, 2/3).
ProcessSample sub_kpz_delta(const Frontier& f, std::int64_t n, double gamma, const UGrid& g);

enum class AiryKind { wedge, flat };

struct AirySample {
  ProcessSample H;       ///< H_n(u)
  ProcessSample delta;   ///< Δ_n(2^{2/3} u), same offsets as H
  double identity_residual = 0.0;  ///< max_u |H(u) - H(0) - 2^{1/6} Δ(2^{2/3} u)|
};

/// Centering constant per unit n of L at [0]_n (4 for both kinds).
double airy_centering(AiryKind kind) noexcept;

/// H_n(u) = (L[2^{2/3} u n^{2/3}] - 4n) / (2^{4/3} n^{1/3}) from a frontier of
/// the wedge or flat profile covering g.band(2^{2/3}).
AirySample airy_from_frontier(const Frontier& f, AiryKind kind, std::int64_t n, const UGrid& g);
AirySample airy_point_process(AiryKind kind, const WeightField& w, std::int64_t n, const UGrid& g);

struct SheetSample {
  std::uint64_t replica = 0;
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> delta;  ///< Δ_n(u_a, v_b) at index a * v.size() + b
  std::vector<double> H;      ///< H_n(u_a, v_b)
  double identity_residual = 0.0;

  double delta_at(std::size_t a, std::size_t b) const { return delta[a * v.size() + b]; }
  double H_at(std::size_t a, std::size_t b) const { return H[a * v.size() + b]; }
};

/// Point-to-point sheet from sources [u n^{2/3}]_0 to targets [v n^{2/3}]_n:
/// one backward sweep per distinct target offset.
SheetSample sheet_sample(const WeightField& w, std::int64_t n, const std::vector<double>& u,
                         const std::vector<double>& v, double C);

/// B_n(v) = (L^ρ[k] - L^ρ[0] - μ_ρ k) / (2^{3/2} n^{1/3}) with k = ⌊v n^{2/3}⌋.
ProcessSample bridge_from_frontier(const Frontier& f, double rho, std::int64_t n, const UGrid& g);
/// Requires rho in [1/4, 3/4].
ProcessSample stationary_bridge(const WeightField& w, double rho, std::int64_t n, const UGrid& g,
                                std::uint64_t lane = 0);

enum class SandwichVariant {
  local,     ///< E_n(r): exit order of s_{ρ-}, b, s_{ρ+}
  sources,   ///< Ē_n(r): point-to-point sources in [0, C n^{2/3}]
};

std::string_view to_string(SandwichVariant v) noexcept;

struct SandwichOptions {
  SandwichVariant variant = SandwichVariant::local;
  /// Lane of the coupled stationary walks s_{ρ±}.
  std::uint64_t lane = 8;
  /// Modulus radii, as fractions of C.
  std::vector<double> deltas{0.05, 0.1, 0.25, 0.5, 1.0};
};

struct SandwichRecord {
  double r = 0.0;
  double C = 0.0;
  std::int64_t n = 0;
  double rho_minus = 0.5;
  double rho_plus = 0.5;
  SandwichVariant variant = SandwichVariant::local;
  bool event = false;
  std::int64_t z_minus_C = 0;  ///< Z^{ρ-}[C n^{2/3}]
  std::int64_t z_b_0 = 0;      ///< Z^b[0]   (local variant)
  std::int64_t z_b_C = 0;      ///< Z^b[C n^{2/3}] (local variant)
  std::int64_t z_plus_0 = 0;   ///< Z^{ρ+}[0]
  std::int64_t pairs_checked = 0;
  std::int64_t violations = 0;
  std::int64_t modulus_checks = 0;
  std::int64_t modulus_violations = 0;
  double worst_excess = 0.0;  ///< largest inequality overshoot beyond rounding slack
};

/// Evaluates the event and, when it holds, audits
///   L^{ρ-}[v]-L^{ρ-}[u] <= L^b[v]-L^b[u] <= L^{ρ+}[v]-L^{ρ+}[u]
/// for every pair of integer offsets 0 <= u <= v <= ⌊C n^{2/3}⌋ (for the
/// sources variant, with L^b replaced by every L_j, j in the same range),
/// and the modulus bound W_Δ(δ) <= max(W_{B-}, W_{B+}) + 3√2 δ r.
/// Throws DomainError when ρ_n^± leaves [1/4, 3/4].
SandwichRecord sandwich_event(const WeightField& w, const Profile& b, double r, double C,
                              std::int64_t n, const SandwichOptions& opt = {});

struct MidpointSandwichRecord {
  double r = 0.0;
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t A = 0;  ///< ⌊n^{2/3}⌋
  bool event = false;  ///< Ē^1_{n,m}(r)
  std::int64_t z_minus_A = 0;  ///< Z_m^{ρ-,1}[A]_n
  std::int64_t z0_0 = 0;       ///< Z_m^0[0]_n
  std::int64_t zA_A = 0;       ///< Z_m^A[A]_n
  std::int64_t z_plus_0 = 0;   ///< Z_m^{ρ+,1}[0]_n
  std::int64_t pairs_checked = 0;
  std::int64_t violations = 0;
  double worst_excess = 0.0;
};

/// Midpoint-model variant: on Ē^1_{n,m}(r), audits
///   L^{ρ-,1}[l]-L^{ρ-,1}[k] <= L_j[l]-L_j[k] <= L^{ρ+,1}[l]-L^{ρ+,1}[k]
/// for j in `sources` and k <= l in `targets` (offsets within [0, A]).
MidpointSandwichRecord midpoint_sandwich(const WeightField& w, double r, std::int64_t n,
                                         const std::vector<std::int64_t>& sources,
                                         const std::vector<std::int64_t>& targets,
                                         std::uint64_t lane_base = 16);

}  // namespace lpplab
