#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lpplab/errors.hpp"
#include "lpplab/stats.hpp"

using namespace lpplab;

namespace {

std::vector<double> normals(std::size_t n, double mean, double sd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(mean, sd);
  std::vector<double> out(n);
  for (auto& x : out) x = d(rng);
  return out;
}

}  // namespace

TEST(Stats, NormalCdfValues) {
  EXPECT_NEAR(normal_cdf(1.0), 0.8413447460685429, 1e-15);
  EXPECT_NEAR(normal_cdf(-2.0, 4.0), 0.15865525393145707, 1e-15);
  EXPECT_NEAR(normal_cdf(-8.0), 6.22096057427178e-16, 1e-27);
  EXPECT_THROW(normal_cdf(0.0, 0.0), DomainError);
}

TEST(Stats, KsToGaussian) {
  const auto s = SampleSet::of("n", normals(10000, 0.0, std::sqrt(2.0), 1));
  EXPECT_TRUE(ks_to_gaussian(s, 2.0).pass);
  EXPECT_LT(ks_to_gaussian(s, 2.0).metric, 0.02);

  const auto shifted = SampleSet::of("s", normals(200000, 1.0, 1.0, 2));
  const double oracle = normal_cdf(0.5) - normal_cdf(-0.5);
  EXPECT_NEAR(oracle, 0.3829249225480262, 1e-12);
  EXPECT_NEAR(ks_to_gaussian(shifted, 1.0).metric, oracle, 0.006);
  EXPECT_FALSE(ks_to_gaussian(shifted, 1.0).pass);

  EXPECT_THROW(ks_to_gaussian(SampleSet::of("e", {}), 1.0), DomainError);
  EXPECT_THROW(ks_to_gaussian(s, -1.0), DomainError);
}

TEST(Stats, KsPermutationInvariant) {
  auto v = normals(1000, 0.0, 1.0, 3);
  const double d1 = ks_to_gaussian(SampleSet::of("a", v), 1.0).metric;
  std::reverse(v.begin(), v.end());
  std::shuffle(v.begin(), v.end(), std::mt19937_64(4));
  EXPECT_EQ(ks_to_gaussian(SampleSet::of("a", v), 1.0).metric, d1);
}

TEST(Stats, KsTwoSampleMatchesBruteForce) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> d(-5, 5);  // ties on purpose
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(30 + trial), b(17 + 2 * trial);
    for (auto& x : a) x = d(rng);
    for (auto& x : b) x = d(rng) + 0.5 * (trial % 2);
    double brute = 0.0;
    for (double t = -6.0; t <= 6.0; t += 0.25) {
      const double fa = std::count_if(a.begin(), a.end(), [t](double x) { return x <= t; }) / double(a.size());
      const double fb = std::count_if(b.begin(), b.end(), [t](double x) { return x <= t; }) / double(b.size());
      brute = std::max(brute, std::abs(fa - fb));
    }
    EXPECT_NEAR(ks_two_sample_distance(a, b), brute, 1e-15);
  }
  const std::vector<double> x{1, 2, 3};
  EXPECT_EQ(ks_two_sample_distance(x, x), 0.0);
}

TEST(Stats, StationaryIncrementCdf) {
  for (double rho : {0.3, 0.5, 0.75}) {
    std::mt19937_64 rng(6);
    std::exponential_distribution<double> e1(1.0 - rho), e2(rho);
    std::vector<double> s(20000);
    for (auto& x : s) x = e1(rng) - e2(rng);
    EXPECT_LT(ks_distance(s, [rho](double x) { return stationary_increment_cdf(x, rho); }), 0.015);
    EXPECT_NEAR(stationary_increment_cdf(0.0, rho), 1.0 - rho, 1e-15);
  }
}

TEST(Stats, MomentsConstantSample) {
  const auto m = moment_stats(SampleSet::of("c", std::vector<double>(100, 2.5)));
  EXPECT_EQ(m.mean_a, 2.5);
  EXPECT_EQ(m.var_a, 0.0);
  EXPECT_EQ(m.var_a_ci.width(), 0.0);
  EXPECT_EQ(m.mean_a_ci.width(), 0.0);
}

TEST(Stats, MomentsIndependentAndNegated) {
  const auto a = SampleSet::of("a", normals(10000, 1.0, 2.0, 7));
  const auto b = SampleSet::of("b", normals(10000, 0.0, 1.0, 8));
  const auto m = moment_stats(a, &b);
  EXPECT_LE(std::abs(m.correlation), 0.03);
  EXPECT_NEAR(m.mean_a, 1.0, 0.06);
  EXPECT_NEAR(m.var_a, 4.0, 0.2);
  EXPECT_LT(m.correlation_ci.lo, m.correlation);
  EXPECT_GT(m.correlation_ci.hi, m.correlation);

  std::vector<double> neg = a.values;
  for (auto& x : neg) x = -x;
  const auto mn = moment_stats(SampleSet::of("neg", neg));
  EXPECT_NEAR(mn.mean_a, -m.mean_a, 1e-12);
  EXPECT_NEAR(mn.var_a, m.var_a, 1e-10);

  const auto m2 = moment_stats(a, &b);
  EXPECT_EQ(m2.var_a_ci.lo, m.var_a_ci.lo);
  EXPECT_EQ(m2.correlation_ci.hi, m.correlation_ci.hi);

  const auto short_b = SampleSet::of("s", {1.0});
  EXPECT_THROW(moment_stats(a, &short_b), DomainError);
  EXPECT_THROW(moment_stats(SampleSet::of("e", {})), DomainError);
}

TEST(Stats, BootstrapWidthScaling) {
  const auto small = SampleSet::of("s", normals(2500, 0.0, 1.0, 9));
  const auto large = SampleSet::of("l", normals(10000, 0.0, 1.0, 10));
  const double ws = moment_stats(small).mean_a_ci.width();
  const double wl = moment_stats(large).mean_a_ci.width();
  EXPECT_NEAR(wl / ws, 0.5, 0.1);
}

TEST(Stats, TailCurveBasics) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // |Z| / n^{2/3} Pareto with tail r^{-3} above 1.
  const std::int64_t n = 512;
  std::vector<double> z(50000);
  for (auto& x : z) x = (u(rng) < 0.5 ? -1 : 1) * 64.0 * std::pow(1.0 - u(rng), -1.0 / 3.0);
  std::vector<double> r;
  for (double x = 0.0; x <= 8.0; x += 0.5) r.push_back(x);
  const auto c = tail_curve(SampleSet::of("z", z), n, 1.0, r);
  EXPECT_EQ(c.R.front(), 1.0);
  EXPECT_TRUE(c.monotone());
  for (double p : c.R) EXPECT_TRUE(p >= 0.0 && p <= 1.0);
  EXPECT_NEAR(tail_slope(c, 1.0, 6.0), -3.0, 0.1);
  EXPECT_TRUE(std::isnan(tail_slope(c, 1.0, 6.0, 1000000)));
  EXPECT_THROW(tail_curve(SampleSet::of("e", {}), n, 1.0, r), DomainError);
  EXPECT_THROW(tail_curve(SampleSet::of("z", z), n, 1.0, {1.0, 0.5}), DomainError);
}

TEST(Stats, ModulusBruteForce) {
  const std::vector<double> u{0.0, 0.1, 0.2, 0.35, 0.5, 1.0};
  const std::vector<double> x{0.0, 1.0, -0.5, 0.25, 2.0, -1.0};
  EXPECT_EQ(modulus(u, x, 0.05), 0.0);
  EXPECT_EQ(modulus(u, x, 0.1), 1.5);
  double prev = 0.0;
  for (double d = 0.0; d <= 1.0; d += 0.01) {
    const double w = modulus(u, x, d);
    double brute = 0.0;
    for (std::size_t a = 0; a < u.size(); ++a)
      for (std::size_t b = 0; b < u.size(); ++b)
        if (std::abs(u[a] - u[b]) <= d + 1e-12) brute = std::max(brute, std::abs(x[a] - x[b]));
    EXPECT_EQ(w, brute);
    EXPECT_GE(w, prev);
    prev = w;
  }
  EXPECT_EQ(modulus(u, x, 1.0), 3.0);
}

TEST(Stats, HistogramMergeAssociative) {
  const auto v = normals(3000, 0.0, 2.0, 12);
  Histogram a(-3, 3, 12), b(-3, 3, 12), c(-3, 3, 12), all(-3, 3, 12);
  for (std::size_t q = 0; q < v.size(); ++q) {
    (q % 3 == 0 ? a : q % 3 == 1 ? b : c).add(v[q]);
    all.add(v[q]);
  }
  Histogram ab = a;
  ab.merge(b);
  ab.merge(c);
  Histogram cb = c;
  cb.merge(b);
  cb.merge(a);
  EXPECT_EQ(ab, all);
  EXPECT_EQ(cb, all);
  EXPECT_EQ(all.total(), v.size());
  double mass = 0.0;
  for (double d : all.density()) mass += d * all.bin_width();
  EXPECT_NEAR(mass + double(all.underflow() + all.overflow()) / all.total(), 1.0, 1e-12);
  EXPECT_THROW(all.merge(Histogram(-3, 3, 10)), DomainError);
}

TEST(Stats, ExitLawVerdicts) {
  const std::int64_t n = 512;
  const double unit = std::cbrt(4.0) * 64.0;
  std::vector<double> z1, z2;
  for (double x : normals(5000, 0.0, 0.6, 13)) z1.push_back(std::round(x * unit));
  for (double x : normals(5000, 0.0, 0.6, 14)) z2.push_back(std::round(x * unit * std::cbrt(4.0)));
  const auto e1 = SampleSet::of("n", z1), e2 = SampleSet::of("2n", z2);
  const auto law = exit_law_histogram(e1, n, &e2);
  EXPECT_TRUE(law.symmetry.pass);
  EXPECT_TRUE(law.localization.pass);
  ASSERT_TRUE(law.stability.has_value());
  EXPECT_TRUE(law.stability->pass);
  EXPECT_EQ(law.histogram.total(), 5000u);

  std::vector<double> biased = z1;
  for (auto& x : biased) x += unit;
  EXPECT_FALSE(exit_law_histogram(SampleSet::of("b", biased), n).symmetry.pass);
  EXPECT_THROW(exit_law_histogram(SampleSet::of("e", {}), n), DomainError);
}
