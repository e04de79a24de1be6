#pragma once

// Estimators turning replica samples into pass/fail verdicts.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lpplab/scaling.hpp"

namespace lpplab {

struct SampleSet {
  std::string label;
  std::vector<double> values;
  std::uint64_t replicas = 0;

  static SampleSet of(std::string label, std::vector<double> values) {
    const auto n = values.size();
    return SampleSet{std::move(label), std::move(values), n};
  }
  std::size_t size() const noexcept { return values.size(); }
};

struct Verdict {
  std::string name;
  double metric = 0.0;
  double threshold = 0.0;
  bool pass = false;
  /// Standard error of the metric, or the half-width of its CI; NaN if unknown.
  double error = std::numeric_limits<double>::quiet_NaN();
  std::optional<std::pair<double, double>> ci;

  /// pass iff metric <= threshold.
  static Verdict at_most(std::string name, double metric, double threshold);
  /// pass iff metric >= threshold.
  static Verdict at_least(std::string name, double metric, double threshold);
};

/// CDF of N(0, variance), via erfc.
double normal_cdf(double x, double variance = 1.0);

/// CDF of Exp(1-rho) - Exp(rho) (rates), the stationary increment law.
double stationary_increment_cdf(double x, double rho);

/// sup_x |F_n(x) - F(x)|.
double ks_distance(std::span<const double> sample, const std::function<double(double)>& cdf);
double ks_two_sample_distance(std::span<const double> a, std::span<const double> b);

Verdict ks_to_cdf(const SampleSet& s, const std::function<double(double)>& cdf, double threshold,
                  std::string name = "ks");
/// Throws DomainError on an empty sample or nonpositive variance.
Verdict ks_to_gaussian(const SampleSet& s, double variance, double threshold = 0.02);
Verdict ks_two_sample(const SampleSet& a, const SampleSet& b, double threshold = 0.05);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const noexcept { return hi - lo; }
};

struct MomentStats {
  std::size_t count = 0;
  double mean_a = 0.0, var_a = 0.0;
  double mean_b = 0.0, var_b = 0.0;
  double covariance = 0.0, correlation = 0.0;
  Interval mean_a_ci, var_a_ci;
  Interval mean_b_ci, var_b_ci, correlation_ci;
  bool has_b = false;

  double se_a() const;
};

struct BootstrapOptions {
  int resamples = 1000;
  std::uint64_t seed = 0x5eed;
  double level = 0.95;
};

/// Unbiased moments and percentile-bootstrap CIs. Throws DomainError on an
/// empty sample or a length mismatch.
MomentStats moment_stats(const SampleSet& a, const SampleSet* b = nullptr,
                         const BootstrapOptions& opt = {});

struct TailCurve {
  std::vector<double> r;
  std::vector<double> R;
  std::vector<std::int64_t> counts;  ///< number of samples with |Z| >= r n^{2/3}
  std::size_t total = 0;
  std::int64_t n = 0;
  double C = 0.0;

  bool monotone() const;
};

/// R_C(r) = P(|Z| >= r n^{2/3}) with r >= 0 nondecreasing.
TailCurve tail_curve(const SampleSet& exits, std::int64_t n, double C, std::vector<double> r);

/// OLS slope of log R against log r over r in [r_lo, r_hi], restricted to
/// points with at least min_hits hits. NaN if fewer than two points qualify.
double tail_slope(const TailCurve& c, double r_lo, double r_hi, std::int64_t min_hits = 50);

/// max |x(u) - x(v)| over grid pairs with |u - v| <= delta.
double modulus(std::span<const double> u, std::span<const double> x, double delta);
double modulus(const ProcessSample& p, double delta);

/// Fixed-bin histogram over [lo, hi); mergeable across workers.
class Histogram {
 public:
  Histogram(double lo, double hi, std::size_t bins);

  void add(double x);
  /// Throws DomainError if binnings differ.
  void merge(const Histogram& other);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  std::size_t bins() const noexcept { return counts_.size(); }
  double bin_width() const noexcept { return (hi_ - lo_) / static_cast<double>(counts_.size()); }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  std::uint64_t underflow() const noexcept { return under_; }
  std::uint64_t overflow() const noexcept { return over_; }
  std::uint64_t total() const noexcept;
  /// Probability density per bin (mass outside the range counts in the total).
  std::vector<double> density() const;

  bool operator==(const Histogram&) const = default;

 private:
  double lo_, hi_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t under_ = 0, over_ = 0;
};

struct ExitLawOptions {
  double symmetry_se = 3.0;
  double stability_ks = 0.05;
  double mass_radius = 4.0;
  double mass_fraction = 0.02;
  double range = 5.0;
  std::size_t bins = 50;
};

struct ExitLaw {
  Histogram histogram{-5.0, 5.0, 50};
  std::vector<double> scaled;  ///< Z / (2^{2/3} n^{2/3})
  double mean = 0.0;
  double se = 0.0;
  Verdict symmetry;
  Verdict localization;
  std::optional<Verdict> stability;  ///< KS against the doubled-n sample
};

/// Throws DomainError on empty input.
ExitLaw exit_law_histogram(const SampleSet& exits, std::int64_t n,
                           const SampleSet* exits_2n = nullptr, const ExitLawOptions& opt = {});

}  // namespace lpplab
