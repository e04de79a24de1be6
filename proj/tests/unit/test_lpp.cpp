#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "brute_force.hpp"
#include "lpplab/errors.hpp"
#include "lpplab/lpp.hpp"

using namespace lpplab;
using lpplab::testing::brute_lpp;
using lpplab::testing::brute_profile;
using lpplab::testing::fixture_profiles;

TEST(Evolve, WedgeSingleStep) {
  const WeightField w(1, 1);
  const auto f = evolve_profile(w, Profile::wedge(), 1, {0, 0});
  const double expect = std::max(w.weight_at({1, 0}), w.weight_at({0, 1})) + w.weight_at({1, 1});
  EXPECT_EQ(f.value(0).value(), expect);
  EXPECT_EQ(f.exit(0), 0);
  EXPECT_EQ(f.t(), 2);
}

TEST(Evolve, MatchesExhaustiveEnumeration) {
  for (std::uint64_t rep = 0; rep < 6; ++rep) {
    const WeightField w(77, rep);
    const auto profiles = fixture_profiles(w);
    for (std::int64_t n = 1; n <= 5; ++n) {
      const TargetBand band{-n - 1, n + 1};
      const auto fronts = evolve_profiles(w, profiles, n, band);
      for (std::size_t q = 0; q < profiles.size(); ++q) {
        EXPECT_TRUE(exits_monotone(fronts[q]));
        for (std::int64_t k = band.k_lo; k <= band.k_hi; ++k) {
          const auto oracle = brute_profile(w, profiles[q], k, n);
          const auto v = fronts[q].value(k);
          ASSERT_EQ(oracle.finite, v.is_finite()) << "profile " << q << " n " << n << " k " << k;
          if (!oracle.finite) continue;
          EXPECT_EQ(v.value(), oracle.value);
          EXPECT_EQ(fronts[q].exit(k), oracle.exit) << "profile " << q << " n " << n << " k " << k;
        }
      }
    }
  }
}

TEST(Evolve, SingleProfileMatchesBatch) {
  const WeightField w(5, 5);
  const auto profiles = fixture_profiles(w);
  const auto fronts = evolve_profiles(w, profiles, 40, {-7, 9});
  for (std::size_t q = 0; q < profiles.size(); ++q) {
    const auto f = evolve_profile(w, profiles[q], 40, {-7, 9});
    for (std::int64_t k = -7; k <= 9; ++k) {
      EXPECT_EQ(f.value(k), fronts[q].value(k));
      if (f.value(k).is_finite()) {
        EXPECT_EQ(f.exit(k), fronts[q].exit(k));
      }
    }
  }
}

TEST(Evolve, WedgeEqualsPointToPoint) {
  const WeightField w(9, 2);
  const std::int64_t n = 30;
  const auto f = evolve_profile(w, Profile::wedge(), n, {-n, n});
  for (std::int64_t k = -n; k <= n; ++k) {
    EXPECT_EQ(f.exit(k), 0);
    EXPECT_NEAR(f.value(k).value(), point_lpp(w, {0, 0}, antidiagonal_site(k, n)), 1e-9);
  }
  EXPECT_TRUE(f.value(n).is_finite());
}

TEST(Evolve, Errors) {
  const WeightField w(1, 0);
  EXPECT_THROW(evolve_profile(w, Profile::flat(), 0, {0, 0}), DomainError);
  EXPECT_THROW(evolve_profile(w, Profile::flat(), 3, {2, 1}), DomainError);
  CustomTable far;
  far.values = {{0, 0.0}};
  // Every feasible source of [10]_3 lies in [7, 13], where the table is bottom.
  EXPECT_THROW(evolve_profile(w, Profile::custom(far), 3, {10, 10}), NoPathError);
  const auto f = evolve_profile(w, Profile::wedge(), 3, {0, 4});
  EXPECT_TRUE(f.value(4).is_bottom());
  EXPECT_THROW(f.exit(4), NoPathError);
  EXPECT_THROW(f.exit(5), DomainError);
  EXPECT_THROW(exit_point(f, 4), NoPathError);
}

TEST(Evolve, FlatExitAtFirstSite) {
  // Two boundary points reach (1,0) with the same value; the rightmost wins.
  for (std::uint64_t rep = 0; rep < 5; ++rep) {
    const WeightField w(3, rep);
    const auto r = profile_lpp(w, Profile::flat(), {1, 0});
    EXPECT_EQ(r.exit, 1);
    EXPECT_EQ(r.value.value(), w.weight_at({1, 0}));
  }
}

TEST(Evolve, ProfileLppAgreesWithFrontier) {
  const WeightField w(12, 0);
  for (const auto& p : fixture_profiles(w)) {
    const auto f = evolve_profile(w, p, 6, {-3, 3});
    for (std::int64_t k = -3; k <= 3; ++k) {
      const auto r = profile_lpp(w, p, antidiagonal_site(k, 6));
      ASSERT_EQ(r.value.is_bottom(), f.value(k).is_bottom());
      if (r.value.is_bottom()) continue;
      EXPECT_NEAR(r.value.value(), f.value(k).value(), 1e-12);
      EXPECT_EQ(r.exit, f.exit(k));
    }
    for (Site y : {Site{2, 1}, Site{-1, 4}, Site{5, 0}}) {
      const auto r = profile_lpp(w, p, y);
      std::int64_t exit = 0;
      bool any = false;
      double val = 0;
      for (std::int64_t z = -y.j; z <= y.i; ++z) {
        if (p.value(z).is_bottom()) continue;
        const double v = p.value(z).raw() + brute_lpp(w, {z, -z}, y).value;
        if (!any || v >= val) val = v, exit = z, any = true;
      }
      ASSERT_EQ(any, r.value.is_finite());
      if (!any) continue;
      EXPECT_NEAR(r.value.value(), val, 1e-12);
      EXPECT_EQ(r.exit, exit);
    }
  }
}

TEST(Evolve, ExitsMonotoneOnLargeFrontiers) {
  for (std::uint64_t rep = 0; rep < 4; ++rep) {
    const WeightField w(8, rep);
    const auto fronts = evolve_profiles(w, fixture_profiles(w), 200, {-60, 60});
    for (const auto& f : fronts) EXPECT_TRUE(exits_monotone(f));
  }
}

TEST(Evolve, FrontierTable) {
  const WeightField w(1, 2);
  const auto f = evolve_profile(w, Profile::wedge(), 1, {0, 2});
  std::ostringstream os;
  write_frontier_table(os, f);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("t\td\tvalue\texit\n", 0), 0u);
  EXPECT_NE(s.find("2\t4\t-inf\tNA\n"), std::string::npos);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 4);
}

TEST(PointLpp, SingleStep) {
  const WeightField w(4, 4);
  EXPECT_EQ(point_lpp(w, {3, 2}, {4, 2}), w.weight_at({4, 2}));
  EXPECT_EQ(point_lpp(w, {3, 2}, {4, 2}, Direction::reverse), w.weight_at({4, 2}));
  EXPECT_EQ(point_lpp(w, {3, 2}, {3, 2}), 0.0);
  EXPECT_THROW(point_lpp(w, {3, 2}, {2, 5}), DomainError);
  EXPECT_THROW(point_lpp(w, {-3, 2}, {2, 5}), DomainError);
}

TEST(PointLpp, MatchesEnumeration) {
  const WeightField w(21, 0);
  for (Site x : {Site{0, 0}, Site{2, -1}, Site{1, 3}}) {
    for (std::int64_t di = 0; di <= 5; ++di) {
      for (std::int64_t dj = 0; dj <= 5; ++dj) {
        const Site y{x.i + di, x.j + dj};
        EXPECT_EQ(point_lpp(w, x, y), brute_lpp(w, x, y).value);
      }
    }
  }
}

TEST(PointLpp, ForwardReverseAgree) {
  const WeightField w(6, 6);
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<int> c(0, 64);
  for (int q = 0; q < 100; ++q) {
    Site x{c(gen), c(gen)}, y{c(gen), c(gen)};
    if (x.i > y.i) std::swap(x.i, y.i);
    if (x.j > y.j) std::swap(x.j, y.j);
    EXPECT_NEAR(point_lpp(w, x, y), point_lpp(w, x, y, Direction::reverse), 1e-9);
  }
}

TEST(PointLpp, SuperadditivityAndGeodesicSplit) {
  const WeightField w(13, 1);
  std::mt19937_64 gen(2);
  std::uniform_int_distribution<int> c(0, 40);
  for (int q = 0; q < 60; ++q) {
    Site x{c(gen), c(gen)}, y{c(gen) + 41, c(gen) + 41};
    Site z{std::uniform_int_distribution<std::int64_t>(x.i, y.i)(gen),
           std::uniform_int_distribution<std::int64_t>(x.j, y.j)(gen)};
    const double lxy = point_lpp(w, x, y);
    EXPECT_GE(lxy + 1e-9, point_lpp(w, x, z) + point_lpp(w, z, y));
    const auto g = geodesic(w, x, y);
    const Site on = g.sites[g.sites.size() / 3];
    EXPECT_NEAR(lxy, point_lpp(w, x, on) + point_lpp(w, on, y), 1e-9);
  }
}

TEST(Geodesic, Structure) {
  const WeightField w(2, 9);
  const Site x{3, 1}, y{4, 2};
  const auto g = geodesic(w, x, y);
  ASSERT_EQ(g.sites.size(), 3u);
  const Site mid = w.weight_at({4, 1}) >= w.weight_at({3, 2}) ? Site{4, 1} : Site{3, 2};
  EXPECT_EQ(g.sites[1], mid);
  EXPECT_EQ(g.source(), x);
  EXPECT_EQ(g.target(), y);
  EXPECT_EQ(geodesic(w, x, x).sites.size(), 1u);
  EXPECT_THROW(geodesic(w, y, x), DomainError);
}

TEST(Geodesic, WeightIdentityIsExact) {
  const WeightField w(17, 3);
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> c(0, 30);
  for (int q = 0; q < 1000; ++q) {
    Site x{c(gen), c(gen)}, y{c(gen), c(gen)};
    if (x.i > y.i) std::swap(x.i, y.i);
    if (x.j > y.j) std::swap(x.j, y.j);
    const auto g = geodesic(w, x, y);
    for (std::size_t p = 1; p < g.sites.size(); ++p) {
      const Site d{g.sites[p].i - g.sites[p - 1].i, g.sites[p].j - g.sites[p - 1].j};
      ASSERT_TRUE((d == Site{1, 0}) || (d == Site{0, 1}));
    }
    ASSERT_EQ(path_weight(w, g), point_lpp(w, x, y));
  }
}

TEST(Geodesic, MatchesEnumeration) {
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    const WeightField w(55, rep);
    const Site x{0, 0};
    for (std::int64_t k = -3; k <= 3; ++k) {
      const Site y = antidiagonal_site(k, 4);
      const auto oracle = brute_lpp(w, x, y);
      ASSERT_EQ(oracle.argmax.size(), 1u);  // continuous weights: unique maximizer
      EXPECT_EQ(geodesic(w, x, y).sites, oracle.argmax.front());
    }
  }
}

TEST(Geodesic, OrderedEndpointsCross) {
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    const WeightField w(101, rep);
    std::mt19937_64 gen(rep);
    const std::int64_t n = 24;
    std::uniform_int_distribution<std::int64_t> zd(-8, 8), kd(-8, 8);
    std::int64_t z1 = zd(gen), z2 = zd(gen), k = kd(gen), l = kd(gen);
    if (z1 > z2) std::swap(z1, z2);
    if (k > l) std::swap(k, l);
    const auto g1 = geodesic(w, antidiagonal_site(z1, 0), antidiagonal_site(l, n));
    const auto g2 = geodesic(w, antidiagonal_site(z2, 0), antidiagonal_site(k, n));
    EXPECT_TRUE(crossing_site(g1, g2).has_value()) << rep;
  }
}

TEST(Geodesic, CrossingFixtures) {
  const WeightField w(3, 3);
  const auto g = geodesic(w, {0, 0}, {6, 5});
  EXPECT_EQ(crossing_site(g, g), Site(0, 0));
  Geodesic a, b;
  for (int i = 0; i <= 5; ++i) a.sites.push_back({i, 0});
  for (int i = 0; i <= 5; ++i) b.sites.push_back({i, 2});
  EXPECT_FALSE(crossing_site(a, b).has_value());
  b.sites = {{1, -1}, {2, -1}, {2, 0}, {3, 0}};
  EXPECT_EQ(crossing_site(a, b), Site(2, 0));
  EXPECT_EQ(a.at_time(3), Site(3, 0));
  EXPECT_FALSE(a.at_time(9).has_value());
}

TEST(GeodesicMidpoint, EndsAndOracle) {
  for (std::uint64_t rep = 0; rep < 8; ++rep) {
    const WeightField w(66, rep);
    for (std::int64_t n = 1; n <= 6; ++n) {
      for (std::int64_t j = -2; j <= 2; ++j) {
        std::int64_t prev = std::numeric_limits<std::int64_t>::min();
        for (std::int64_t k = j - n; k <= j + n; ++k) {
          EXPECT_EQ(geodesic_midpoint(w, j, k, n, 0), j);
          EXPECT_EQ(geodesic_midpoint(w, j, k, n, n), k);
          const std::int64_t m = n / 2;
          const std::int64_t z = geodesic_midpoint(w, j, k, n, m);
          const auto oracle = brute_lpp(w, antidiagonal_site(j, 0), antidiagonal_site(k, n));
          EXPECT_EQ(antidiagonal_site(z, m), oracle.argmax.front()[static_cast<std::size_t>(2 * m)]);
          EXPECT_GE(z, prev);
          prev = z;
        }
      }
    }
  }
  const WeightField w(1, 1);
  EXPECT_THROW(geodesic_midpoint(w, 0, 0, 4, 5), DomainError);
  EXPECT_THROW(geodesic_midpoint(w, 0, 9, 4, 2), DomainError);
}

TEST(Midpoint, MatchesEnumeration) {
  for (std::uint64_t rep = 0; rep < 4; ++rep) {
    const WeightField w(90, rep);
    for (std::int64_t n = 2; n <= 6; ++n) {
      const TargetBand band{-2, 2};
      const auto mm = midpoint_models(w, 0.6, n, band, 16);
      const std::int64_t m = n / 2;
      ASSERT_EQ(mm.m, m);
      const StationaryWalk s1(0.6, {w, 17}), s2(0.6, {w, 18});
      for (std::int64_t k = band.k_lo; k <= band.k_hi; ++k) {
        double best1 = -INFINITY, best2 = -INFINITY;
        std::int64_t arg1 = 0, arg2 = 0;
        for (std::int64_t j = k - (n - m); j <= k + (n - m); ++j) {
          const double v = s1.value(j) + brute_lpp(w, antidiagonal_site(j, m), antidiagonal_site(k, n)).value;
          if (v >= best1) best1 = v, arg1 = j;
        }
        for (std::int64_t j = k - m; j <= k + m; ++j) {
          const double v = s2.value(j) + brute_lpp(w, antidiagonal_site(k, 0), antidiagonal_site(j, m)).value;
          if (v >= best2) best2 = v, arg2 = j;
        }
        EXPECT_NEAR(mm.frontier1.value(k).value(), best1, 1e-12);
        EXPECT_EQ(mm.frontier1.exit(k), arg1);
        EXPECT_NEAR(mm.frontier2.value(k).value(), best2, 1e-12);
        EXPECT_EQ(mm.frontier2.exit(k), arg2);
      }
      EXPECT_EQ(mm.frontier1.t(), 2 * n);
      EXPECT_EQ(mm.frontier2.t(), 0);
    }
  }
}

TEST(Midpoint, WeightRegionsDisjoint) {
  const WeightField w(4, 0);
  const std::int64_t n = 40, m = n / 2;
  std::set<std::pair<std::int64_t, std::int64_t>> first, second;
  bool in_second = false;
  bool interleaved = false;
  RowFiller recording = [&](std::int64_t i0, std::int64_t j0, std::span<double> out) {
    const bool low = i0 + j0 <= 2 * m;
    if (low) in_second = true;
    if (!low && in_second) interleaved = true;
    auto& bucket = low ? second : first;
    for (std::size_t p = 0; p < out.size(); ++p) bucket.insert({i0 + std::int64_t(p), j0 - std::int64_t(p)});
    w.fill_antidiagonal(i0, j0, out);
  };
  const auto mm = midpoint_models(recording, w, 0.5, n, {-5, 5});
  EXPECT_FALSE(interleaved);
  for (const auto& s : first) EXPECT_GT(s.first + s.second, 2 * m);
  for (const auto& s : second) {
    EXPECT_LE(s.first + s.second, 2 * m);
    EXPECT_GT(s.first + s.second, 0);
  }

  // Perturbing one region leaves the other model untouched.
  RowFiller lift_low = [&](std::int64_t i0, std::int64_t j0, std::span<double> out) {
    w.fill_antidiagonal(i0, j0, out);
    if (i0 + j0 <= 2 * m) for (double& x : out) x += 5.0;
  };
  RowFiller lift_high = [&](std::int64_t i0, std::int64_t j0, std::span<double> out) {
    w.fill_antidiagonal(i0, j0, out);
    if (i0 + j0 > 2 * m) for (double& x : out) x += 5.0;
  };
  const auto a = midpoint_models(lift_low, w, 0.5, n, {-5, 5});
  const auto b = midpoint_models(lift_high, w, 0.5, n, {-5, 5});
  for (std::int64_t k = -5; k <= 5; ++k) {
    EXPECT_EQ(a.frontier1.value(k), mm.frontier1.value(k));
    EXPECT_EQ(b.frontier2.value(k), mm.frontier2.value(k));
    EXPECT_NE(a.frontier2.value(k), mm.frontier2.value(k));
  }
}

TEST(Comparison, IdenticalProfiles) {
  const WeightField w(7, 7);
  const auto a = comparison_check(w, Profile::flat(), Profile::flat(), -3, 4, 20);
  EXPECT_TRUE(a.hypothesis);
  EXPECT_TRUE(a.conclusion);
  EXPECT_EQ(a.increment1, a.increment2);
  EXPECT_FALSE(a.violation());
  EXPECT_THROW(comparison_check(w, Profile::flat(), Profile::flat(), 4, 3, 20), DomainError);
}

TEST(Comparison, WedgeOneSided) {
  // With b2 = wedge, Z^{b1}[l] <= 0 forces L^{b1}[l]-L^{b1}[k] <= L^w[l]-L^w[k].
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    const WeightField w(12, rep);
    const auto a = comparison_check(w, Profile::flat(), Profile::wedge(), -6, -1, 32);
    EXPECT_EQ(a.exit2_k, 0);
    EXPECT_FALSE(a.violation());
  }
}

TEST(Comparison, RandomizedAuditsNeverFail) {
  std::mt19937_64 gen(44);
  int hypotheses = 0;
  for (std::uint64_t rep = 0; rep < 1500; ++rep) {
    const WeightField w(5150, rep);
    auto profiles = fixture_profiles(w);
    std::uniform_int_distribution<std::size_t> pick(0, profiles.size() - 1);
    const std::int64_t n = std::uniform_int_distribution<std::int64_t>(1, 48)(gen);
    std::uniform_int_distribution<std::int64_t> kd(-n / 2, n / 2);
    std::int64_t k = kd(gen), l = kd(gen);
    if (k > l) std::swap(k, l);
    const Profile& b1 = profiles[pick(gen)];
    const Profile& b2 = profiles[pick(gen)];
    const Profile both[] = {b1, b2};
    const auto fr = evolve_profiles(w, both, n, {k, l});
    if (fr[0].value(l).is_bottom() || fr[0].value(k).is_bottom() || fr[1].value(l).is_bottom() ||
        fr[1].value(k).is_bottom()) {
      continue;
    }
    const auto a = comparison_check(fr[0], fr[1], k, l, n);
    hypotheses += a.hypothesis;
    ASSERT_FALSE(a.violation()) << "rep " << rep << " k " << k << " l " << l << " n " << n;
  }
  EXPECT_GT(hypotheses, 100);
}

TEST(Symmetry, ReflectedFlatExit) {
  // Reflecting i <-> j maps the rightmost exit Z to 1 - Z pathwise (the
  // optimal path's first site is shared by two boundary points).
  const std::int64_t n = 256;
  std::vector<double> reflected, negated;
  for (std::uint64_t rep = 0; rep < 1000; ++rep) {
    const WeightField w(808, rep);
    RowFiller mirror = [&](std::int64_t i0, std::int64_t j0, std::span<double> out) {
      // Sites (i0+p, j0-p) read the weight of (j0-p, i0+p): a reversed run.
      const auto count = static_cast<std::int64_t>(out.size());
      w.fill_antidiagonal(j0 - count + 1, i0 + count - 1, out);
      std::reverse(out.begin(), out.end());
    };
    const Profile flat = Profile::flat();
    const auto z = evolve_profile(w, flat, n, {0, 0}).exit(0);
    const auto zr = evolve_profiles(mirror, std::span<const Profile>(&flat, 1), 0, n, {0, 0})[0].exit(0);
    ASSERT_EQ(zr, 1 - z);
    reflected.push_back(static_cast<double>(zr));
    negated.push_back(static_cast<double>(-z));
  }
  std::sort(reflected.begin(), reflected.end());
  std::sort(negated.begin(), negated.end());
  double d = 0;
  std::size_t a = 0, b = 0;
  while (a < reflected.size() && b < negated.size()) {
    const double x = std::min(reflected[a], negated[b]);
    while (a < reflected.size() && reflected[a] <= x) ++a;
    while (b < negated.size() && negated[b] <= x) ++b;
    d = std::max(d, std::abs(double(a) - double(b)) / reflected.size());
  }
  EXPECT_LE(d, 0.02);
}
