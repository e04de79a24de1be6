#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "lpplab/errors.hpp"
#include "lpplab/profiles.hpp"

using namespace lpplab;

namespace {

WalkSource source(std::uint64_t replica, std::uint64_t lane = 0) {
  return WalkSource{WeightField(4242, replica), lane};
}

// CDF of Exp(1-rho) - Exp(rho), independent of the library.
double difference_cdf(double x, double rho) {
  const double a = 1.0 - rho, b = rho;
  return x >= 0 ? 1.0 - b / (a + b) * std::exp(-a * x) : a / (a + b) * std::exp(b * x);
}

}  // namespace

TEST(ExtValue, BottomAlgebra) {
  const ExtValue bot = ExtValue::bottom();
  EXPECT_TRUE((bot + ExtValue{3.0}).is_bottom());
  EXPECT_EQ(max(bot, ExtValue{-1e300}), ExtValue{-1e300});
  EXPECT_EQ(max(ExtValue{2.0}, bot), ExtValue{2.0});
  EXPECT_THROW(bot.value(), DomainError);
  std::ostringstream os;
  os << bot << ' ' << ExtValue{1.5};
  EXPECT_EQ(os.str(), "-inf 1.5");
}

TEST(Profiles, PrintedValues) {
  EXPECT_TRUE(Profile::wedge().value(3).is_bottom());
  EXPECT_EQ(Profile::flat().value(-17), ExtValue{0.0});
  EXPECT_TRUE(Profile::wedge_flat().value(-1).is_bottom());
  EXPECT_EQ(Profile::wedge_flat().value(5), ExtValue{0.0});
  const auto ws = Profile::wedge_stationary(0.5, source(1));
  EXPECT_TRUE(ws.value(-2).is_bottom());
  EXPECT_EQ(ws.value(4).raw(), ws.walk().value(4));
  const auto fs = Profile::flat_stationary(0.6, source(1));
  EXPECT_EQ(fs.value(-9), ExtValue{0.0});
  EXPECT_EQ(fs.value(7).raw(), fs.walk().value(7));
}

TEST(Profiles, ZeroAtOriginForEveryKind) {
  CustomTable t;
  t.values = {{0, 0.0}, {2, 1.5}};
  for (auto kind : {ProfileKind::Wedge, ProfileKind::Flat, ProfileKind::Stationary,
                    ProfileKind::WedgeFlat, ProfileKind::WedgeStationary, ProfileKind::FlatStationary}) {
    EXPECT_EQ(Profile::make(kind, 0.3, source(2)).value(0), ExtValue{0.0}) << to_string(kind);
  }
  EXPECT_EQ(Profile::custom(t).value(0), ExtValue{0.0});
  EXPECT_THROW(Profile::make(ProfileKind::Custom, 0.5, source(0)), DomainError);
}

TEST(Profiles, FillAgreesWithValue) {
  CustomTable t;
  t.values = {{-3, 0.5}, {0, 0.0}, {1, ExtValue::bottom()}, {4, -2.0}};
  for (auto kind : {ProfileKind::Wedge, ProfileKind::Flat, ProfileKind::Stationary,
                    ProfileKind::WedgeFlat, ProfileKind::WedgeStationary, ProfileKind::FlatStationary}) {
    const auto p = Profile::make(kind, 0.7, source(3));
    std::vector<double> out(41);
    p.fill(-20, out);
    for (int q = 0; q < 41; ++q) EXPECT_EQ(out[q], p.value(q - 20).raw()) << to_string(kind) << q;
  }
  const auto c = Profile::custom(t);
  std::vector<double> out(11);
  c.fill(-5, out);
  for (int q = 0; q < 11; ++q) EXPECT_EQ(out[q], c.value(q - 5).raw());
}

TEST(Profiles, KindNames) {
  EXPECT_EQ(profile_kind_from_string("wedge-flat"), ProfileKind::WedgeFlat);
  EXPECT_EQ(profile_kind_from_string("flat_stationary"), ProfileKind::FlatStationary);
  EXPECT_EQ(profile_kind_from_string("ws"), ProfileKind::WedgeStationary);
  for (auto kind : {ProfileKind::Wedge, ProfileKind::Flat, ProfileKind::Stationary, ProfileKind::WedgeFlat,
                    ProfileKind::WedgeStationary, ProfileKind::FlatStationary, ProfileKind::Custom}) {
    EXPECT_EQ(profile_kind_from_string(to_string(kind)), kind);
  }
  EXPECT_THROW(profile_kind_from_string("parabolic"), DomainError);
}

TEST(CustomTable, Parse) {
  const auto t = CustomTable::parse("# k value\n0 0\n-2 1.25\n3 -inf\n\n5 -0.5  # tail\n");
  ASSERT_EQ(t.values.size(), 4u);
  EXPECT_EQ(t.values.at(-2), ExtValue{1.25});
  EXPECT_TRUE(t.values.at(3).is_bottom());
  const auto p = Profile::custom(t);
  EXPECT_TRUE(p.value(4).is_bottom());
  EXPECT_EQ(p.value(5), ExtValue{-0.5});

  EXPECT_THROW(CustomTable::parse("1 2\n"), ConfigError);           // no b(0)
  EXPECT_THROW(CustomTable::parse("0 1\n"), ConfigError);           // b(0) != 0
  EXPECT_THROW(CustomTable::parse("0 0\n0 0\n"), ConfigError);      // duplicate
  EXPECT_THROW(CustomTable::parse("0 0\nx 1\n"), ConfigError);      // bad index
  EXPECT_THROW(CustomTable::parse("0 0\n1 one\n"), ConfigError);    // bad value
  EXPECT_THROW(CustomTable::parse("0 0\n1\n"), ConfigError);        // missing column
  EXPECT_THROW(CustomTable::load("/nonexistent/table.txt"), ConfigError);
}

TEST(StationaryWalk, Conventions) {
  const StationaryWalk s(0.3, source(5));
  EXPECT_EQ(s.value(0), 0.0);
  EXPECT_DOUBLE_EQ(s.value(1), s.increment(1));
  EXPECT_DOUBLE_EQ(s.value(2), s.increment(1) + s.increment(2));
  EXPECT_DOUBLE_EQ(s.value(-1), -s.increment(0));
  EXPECT_DOUBLE_EQ(s.value(-2), -(s.increment(-1) + s.increment(0)));
  // Memoization is order independent.
  const StationaryWalk fresh(0.3, source(5));
  EXPECT_EQ(fresh.value(-500), s.value(-500));
  EXPECT_EQ(fresh.value(700), s.value(700));
  EXPECT_THROW(StationaryWalk(1.0, source(0)), DomainError);
  EXPECT_THROW(StationaryWalk(0.0, source(0)), DomainError);
}

TEST(StationaryWalk, IncrementMatchesPair) {
  const auto src = source(8, 3);
  const StationaryWalk s(0.8, src);
  for (int i = -5; i <= 5; ++i) {
    const auto [e1, e2] = src.field.boundary_exp_pair(i, src.lane);
    EXPECT_DOUBLE_EQ(s.increment(i), e1 / (2 * 0.2) - e2 / (2 * 0.8));
  }
}

TEST(StationaryWalk, EquilibriumVariance) {
  std::vector<double> v;
  for (std::uint64_t r = 0; r < 10000; ++r) v.push_back(StationaryWalk(0.5, source(r)).value(100));
  double m = 0, s2 = 0;
  for (double x : v) m += x;
  m /= v.size();
  for (double x : v) s2 += (x - m) * (x - m);
  EXPECT_NEAR(s2 / (v.size() - 1), 800.0, 35.0);
}

TEST(StationaryWalk, Drift) {
  double sum = 0;
  const int reps = 400;
  for (int r = 0; r < reps; ++r) sum += StationaryWalk(0.75, source(r)).value(10000) / 10000.0;
  EXPECT_NEAR(sum / reps, 8.0 / 3.0, 0.02);
}

TEST(StationaryWalk, IncrementLaw) {
  for (double rho : {0.5, 0.3, 0.75}) {
    std::vector<double> inc;
    for (std::uint64_t r = 0; r < 10000; ++r) {
      const StationaryWalk s(rho, source(r, 1));
      inc.push_back(s.value(1) - s.value(0));
    }
    std::sort(inc.begin(), inc.end());
    double d = 0;
    const double n = inc.size();
    for (std::size_t q = 0; q < inc.size(); ++q) {
      const double f = difference_cdf(inc[q], rho);
      d = std::max({d, (q + 1) / n - f, f - q / n});
    }
    EXPECT_LE(d, 0.02) << rho;
  }
}

TEST(StationaryWalk, CoupledPair) {
  EXPECT_EQ(coupled_stationary_values(0.6, 0, source(1)), std::make_pair(0.0, 0.0));
  for (std::uint64_t r = 0; r < 20; ++r) {
    for (int k = -50; k <= 50; ++k) {
      const auto [h, s] = coupled_stationary_values(0.5, k, source(r));
      ASSERT_EQ(h, s);
    }
  }
  for (std::uint64_t r = 0; r < 200; ++r) {
    double prev = 0;
    for (int k = -200; k <= 200; ++k) {
      const auto [h, s] = coupled_stationary_values(0.6, k, source(r));
      if (k > -200) {
        ASSERT_GE(s - h, prev) << "replica " << r << " k " << k;
      }
      prev = s - h;
    }
  }
}

TEST(Characteristics, ClosedForms) {
  const auto c0 = characteristics(0.5);
  EXPECT_EQ(c0.mu, 0.0);
  EXPECT_EQ(c0.a, 1.0);
  EXPECT_EQ(c0.b, 0.0);
  const auto c1 = characteristics(0.25);
  EXPECT_DOUBLE_EQ(c1.a, 9.0);
  EXPECT_DOUBLE_EQ(c1.b, 0.8);
  EXPECT_DOUBLE_EQ(c1.mu, -8.0 / 3.0);
  const auto c3 = characteristics(0.75);
  EXPECT_DOUBLE_EQ(c3.a, 1.0 / 9.0);
  EXPECT_DOUBLE_EQ(c3.b, -0.8);
  EXPECT_DOUBLE_EQ(c3.mu, 8.0 / 3.0);
  EXPECT_THROW(characteristics(1.0), DomainError);
}

TEST(Characteristics, MonotoneAndAntisymmetric) {
  double prev_a = INFINITY;
  for (int q = 1; q < 1000; ++q) {
    const double rho = q / 1000.0;
    const auto c = characteristics(rho);
    EXPECT_LT(c.a, prev_a);
    prev_a = c.a;
    EXPECT_NEAR(c.mu, -characteristics(1.0 - rho).mu, 1e-9 * (1 + std::abs(c.mu)));
  }
}

TEST(RhoN, Values) {
  EXPECT_EQ(rho_n(0.0, 12345, 1), 0.5);
  EXPECT_EQ(rho_n(0.5, 8, 1), 0.75);
  EXPECT_EQ(rho_n(0.5, 8, -1), 0.25);
  EXPECT_THROW(rho_n(4.0, 8, 1), DomainError);
  EXPECT_THROW(rho_n(2.0, 256, 1), DomainError);
}

TEST(MinWalk, ClosedForm) {
  const auto s = min_walk_stats(0.75);
  EXPECT_DOUBLE_EQ(s.mean, -2.0 / 3.0);
  EXPECT_NEAR(s.variance, 20.0 / 9.0, 1e-12);
  EXPECT_THROW(min_walk_stats(0.5), DomainError);
  EXPECT_THROW(min_walk_stats(0.3), DomainError);
}

// Direct simulation of the forward minimum with an unrelated generator.
TEST(MinWalk, SimulationOracle) {
  for (double rho : {0.75, 0.65}) {
    std::mt19937_64 gen(12345);
    std::exponential_distribution<double> e1(1.0 - rho), e2(rho);
    const int walks = 100000, horizon = 1000;
    double sum = 0, sum2 = 0;
    for (int w = 0; w < walks; ++w) {
      double s = 0, mn = 0;
      for (int i = 0; i < horizon; ++i) {
        s += e1(gen) - e2(gen);
        mn = std::min(mn, s);
      }
      sum += mn;
      sum2 += mn * mn;
    }
    const double mean = sum / walks;
    const double var = sum2 / walks - mean * mean;
    const auto closed = min_walk_stats(rho);
    const double se_mean = std::sqrt(var / walks);
    EXPECT_NEAR(mean, closed.mean, std::max(3 * se_mean, rho == 0.75 ? 0.02 : 0.0)) << rho;
    // The variance of a sample variance needs the fourth moment; a 5% band
    // is several standard errors at 10^5 walks for these light tails.
    EXPECT_NEAR(var, closed.variance, 0.05 * closed.variance) << rho;
  }
}
