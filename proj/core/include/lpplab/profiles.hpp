#pragma once

// Boundary profiles b(k) on the antidiagonal {(k,-k)}.

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lpplab/env.hpp"

namespace lpplab {

/// A real number or bottom (-infinity). Bottom absorbs addition and never
/// wins a maximum against a finite value. Represented by IEEE -inf, which
/// has exactly these semantics and cannot be produced by overflow of the
/// finite sums the engine forms.
class ExtValue {
 public:
  constexpr ExtValue() noexcept : v_(-std::numeric_limits<double>::infinity()) {}
  constexpr ExtValue(double v) noexcept : v_(v) {}  // NOLINT(implicit)

  static constexpr ExtValue bottom() noexcept { return ExtValue{}; }

  constexpr bool is_bottom() const noexcept { return v_ == -std::numeric_limits<double>::infinity(); }
  constexpr bool is_finite() const noexcept { return !is_bottom(); }
  /// Raw representation; -inf for bottom.
  constexpr double raw() const noexcept { return v_; }
  /// Finite value. Throws DomainError on bottom.
  double value() const;

  friend constexpr ExtValue operator+(ExtValue a, ExtValue b) noexcept { return ExtValue{a.v_ + b.v_}; }
  friend constexpr bool operator==(ExtValue a, ExtValue b) noexcept { return a.v_ == b.v_; }
  friend constexpr bool operator<(ExtValue a, ExtValue b) noexcept { return a.v_ < b.v_; }
  friend constexpr bool operator<=(ExtValue a, ExtValue b) noexcept { return a.v_ <= b.v_; }

 private:
  double v_;
};

constexpr ExtValue max(ExtValue a, ExtValue b) noexcept { return a < b ? b : a; }

std::ostream& operator<<(std::ostream& os, ExtValue v);

/// Source of stationary-walk increments: one lane of a replica's boundary
/// streams. Walks built from the same source are coupled (they share the
/// underlying Exp(1/2) pairs); different lanes are independent.
struct WalkSource {
  WeightField field;
  std::uint64_t lane = 0;
};

/// Two-sided random walk s_rho with s_rho(0) = 0 and i.i.d. increments
/// zeta_i = Exp(1-rho) - Exp(rho), realized as
///   zeta_i = e1_i / (2(1-rho)) - e2_i / (2 rho),  e1, e2 ~ Exp(1/2).
/// For k < 0, s_rho(k) = -(zeta_{k+1} + ... + zeta_0).
///
/// Values are memoized as prefix sums that grow on demand; the cache is not
/// synchronized, so a walk belongs to one replica's execution context.
class StationaryWalk {
 public:
  StationaryWalk(double rho, WalkSource source);

  double rho() const noexcept { return rho_; }
  const WalkSource& source() const noexcept { return source_; }

  /// zeta_i.
  double increment(std::int64_t i) const noexcept;
  double value(std::int64_t k) const;
  /// out[p] = s_rho(k_lo + p).
  void fill(std::int64_t k_lo, std::span<double> out) const;

 private:
  void extend_to(std::int64_t k) const;

  double rho_;
  double scale1_;
  double scale2_;
  WalkSource source_;
  mutable std::vector<double> pos_{0.0};  // s(0), s(1), ...
  mutable std::vector<double> neg_{0.0};  // s(0), s(-1), ...
};

enum class ProfileKind {
  Wedge,
  Flat,
  Stationary,
  WedgeFlat,
  WedgeStationary,
  FlatStationary,
  Custom,
};

std::string_view to_string(ProfileKind kind) noexcept;
/// Accepts the names produced by to_string plus kebab/snake variants
/// ("wedge-flat", "flat_stationary"). Throws DomainError otherwise.
ProfileKind profile_kind_from_string(std::string_view name);

/// Finite table of boundary values; bottom outside the table.
struct CustomTable {
  std::map<std::int64_t, ExtValue> values;

  /// Two whitespace-separated columns (k, value) per line; "-inf" denotes
  /// bottom; '#' starts a comment. b(0) must be present and equal to 0.
  static CustomTable parse(std::string_view text);
  static CustomTable load(const std::string& path);
};

/// Boundary condition b : Z -> R u {bottom} with b(0) = 0.
class Profile {
 public:
  static Profile wedge();
  static Profile flat();
  static Profile stationary(double rho, WalkSource source);
  static Profile wedge_flat();
  static Profile wedge_stationary(double rho, WalkSource source);
  static Profile flat_stationary(double rho, WalkSource source);
  static Profile custom(CustomTable table);
  /// Builds any kind; rho/source are ignored for kinds without a walk.
  static Profile make(ProfileKind kind, double rho, WalkSource source);

  ProfileKind kind() const noexcept { return kind_; }
  bool has_walk() const noexcept { return walk_ != nullptr; }
  const StationaryWalk& walk() const;
  double rho() const noexcept;

  ExtValue value(std::int64_t k) const;
  /// out[p] = b(k_lo + p) as raw doubles (-inf for bottom).
  void fill(std::int64_t k_lo, std::span<double> out) const;
  /// Smallest interval outside of which b is bottom, if bounded.
  std::pair<std::int64_t, std::int64_t> support_hint() const noexcept;

 private:
  Profile(ProfileKind kind, std::shared_ptr<const StationaryWalk> walk,
          std::shared_ptr<const CustomTable> table)
      : kind_(kind), walk_(std::move(walk)), table_(std::move(table)) {}

  ProfileKind kind_;
  std::shared_ptr<const StationaryWalk> walk_;
  std::shared_ptr<const CustomTable> table_;
};

ExtValue profile_value(const Profile& p, std::int64_t k);
double stationary_value(const StationaryWalk& walk, std::int64_t k);

/// (s_{1/2}(k), s_rho(k)) from the same Exp(1/2) pairs.
std::pair<double, double> coupled_stationary_values(double rho, std::int64_t k,
                                                    const WalkSource& source);

struct Characteristics {
  double mu = 0.0;  ///< drift per step of s_rho
  double a = 1.0;   ///< characteristic direction (a, 1)
  double b = 0.0;   ///< antidiagonal offset fraction (a-1)/(a+1)
};

/// Requires rho in (0,1).
Characteristics characteristics(double rho);

/// rho_n^{+-} = 1/2 +- r n^{-1/3}; throws DomainError unless in [1/4, 3/4].
double rho_n(double r, std::int64_t n, int sign);

struct MinWalkStats {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of m = min_{z >= u} (s_rho(z) - s_rho(u)) for rho > 1/2.
MinWalkStats min_walk_stats(double rho);

}  // namespace lpplab
