#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "lpplab/errors.hpp"
#include "lpplab/harness.hpp"
#include "lpplab/lpp.hpp"
#include "lpplab/scaling.hpp"

namespace lpplab {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string tag(std::initializer_list<std::pair<const char*, double>> kv) {
  std::string s;
  for (const auto& [k, v] : kv) s += std::string(" ") + k + "=" + num(v);
  return s;
}

bool rho_range_ok(double r, std::int64_t n) {
  try {
    rho_n(r, n, +1);
    rho_n(r, n, -1);
    return true;
  } catch (const DomainError&) {
    return false;
  }
}

struct Context {
  const ExperimentConfig& cfg;
  RunResult& out;

  std::int64_t R() const { return cfg.replicas; }
  std::uint64_t id(std::int64_t block, std::int64_t i) const {
    return static_cast<std::uint64_t>(block * cfg.replicas + i);
  }
  WeightField field(std::int64_t block, std::int64_t i) const { return WeightField(cfg.seed, id(block, i)); }
  void each(std::int64_t block, const std::function<void(std::int64_t)>& body) const {
    for_each_replica(cfg.replicas, cfg.workers, id(block, 0), body);
  }
  double th(const char* name) const { return cfg.threshold(name); }
  void check(Verdict v) { out.report.checks.push_back(std::move(v)); }
  void sample(std::int64_t block, std::int64_t i, std::int64_t n, double p1, double p2, double v) {
    out.samples.push_back({id(block, i), n, p1, p2, v});
  }
};

Profile make_profile(const std::string& name, double rho, const WeightField& w) {
  return Profile::make(profile_kind_from_string(name), rho, WalkSource{w, 0});
}

double first_rho(const ExperimentConfig& cfg) { return cfg.rho.empty() ? 0.5 : cfg.rho.front(); }

// |mean - target| in standard errors.
Verdict mean_check(std::string name, const std::vector<double>& x, double target, double limit) {
  const auto m = moment_stats(SampleSet::of(name, x), nullptr, BootstrapOptions{1, 0, 0.95});
  const double se = m.se_a();
  const double z = se > 0.0 ? std::abs(m.mean_a - target) / se : (m.mean_a == target ? 0.0 : INFINITY);
  auto v = Verdict::at_most(std::move(name), z, limit);
  v.error = se;
  return v;
}

// |Var - target| <= tol, with a bootstrap CI on the variance.
Verdict variance_check(std::string name, const std::vector<double>& x, double target, double tol,
                       std::uint64_t seed) {
  const auto m = moment_stats(SampleSet::of(name, x), nullptr, BootstrapOptions{1000, seed, 0.95});
  auto v = Verdict::at_most(std::move(name), std::abs(m.var_a - target), tol);
  v.ci = std::pair{m.var_a_ci.lo, m.var_a_ci.hi};
  v.error = m.var_a_ci.width() / 2.0;
  return v;
}

Verdict ks_gaussian_check(std::string name, const std::vector<double>& x, double variance, double limit) {
  auto v = ks_to_gaussian(SampleSet::of(name, x), variance, limit);
  v.name = std::move(name);
  return v;
}

// ---------------------------------------------------------------------------

void run_stationarity(Context& c) {
  std::int64_t block = 0;
  for (auto n : c.cfg.n) {
    for (double rho : c.cfg.rho) {
      std::vector<double> inc(c.R());
      c.each(block, [&](std::int64_t i) {
        const auto w = c.field(block, i);
        const auto f = evolve_profile(w, Profile::stationary(rho, WalkSource{w, 0}), n, {0, 1});
        inc[i] = f.value(1).value() - f.value(0).value();
      });
      for (std::int64_t i = 0; i < c.R(); ++i) c.sample(block, i, n, rho, 1, inc[i]);
      const auto t = tag({{"rho", rho}, {"n", double(n)}});
      auto ks = ks_to_cdf(SampleSet::of("inc", inc),
                          [rho](double x) { return stationary_increment_cdf(x, rho); }, c.th("ks"));
      ks.name = "increment_ks" + t;
      c.check(ks);
      c.check(mean_check("increment_mean_se" + t, inc, characteristics(rho).mu, c.th("mean_se")));
      ++block;
    }
  }
}

void run_equilibrium_clt(Context& c) {
  std::int64_t block = 0;
  for (auto n : c.cfg.n) {
    for (double rho : c.cfg.rho) {
      const auto g = UGrid::make(c.cfg.C, c.cfg.u, n);
      std::vector<std::vector<double>> d(g.points.size(), std::vector<double>(c.R()));
      c.each(block, [&](std::int64_t i) {
        const auto w = c.field(block, i);
        const auto f = evolve_profile(w, Profile::stationary(rho, WalkSource{w, 0}), n, g.band());
        const auto b = bridge_from_frontier(f, rho, n, g);
        for (std::size_t q = 0; q < d.size(); ++q) d[q][i] = b.values[q];
      });
      const double sigma2 = 1.0 / ((1 - rho) * (1 - rho)) + 1.0 / (rho * rho);
      const auto offs = g.offsets();
      for (std::size_t q = 0; q < d.size(); ++q) {
        const double u = g.points[q];
        for (std::int64_t i = 0; i < c.R(); ++i) c.sample(block, i, n, u, rho, d[q][i]);
        const double var = static_cast<double>(offs[q]) * sigma2 / (8.0 * n_two_thirds(n));
        const auto t = tag({{"u", u}, {"rho", rho}, {"n", double(n)}});
        c.check(variance_check("delta_variance" + t, d[q], var, c.th("var_abs") * std::abs(u), c.cfg.seed));
        c.check(ks_gaussian_check("delta_ks_normal" + t, d[q], var, c.th("ks")));
      }
      ++block;
    }
  }
}

void tail_checks(Context& c, const std::string& label, const std::vector<double>& z, std::int64_t n) {
  const auto curve = tail_curve(SampleSet::of(label, z), n, c.cfg.C, c.cfg.r);
  c.check(Verdict::at_most("tail_monotone_violations " + label, curve.monotone() ? 0.0 : 1.0, 0.0));
  c.check(Verdict::at_most("tail_at_r" + num(c.cfg.r.back()) + " " + label, curve.R.back(), c.th("tail")));
}

void run_localization(Context& c) {
  if (c.cfg.r.empty()) throw ConfigError("localization needs a nonempty r grid");
  const double rho = first_rho(c.cfg);
  std::int64_t block = 0;
  for (auto n : c.cfg.n) {
    const auto K = scaled_floor(c.cfg.C, n);
    const std::size_t P = c.cfg.profiles.size();
    std::vector<std::vector<double>> z(P, std::vector<double>(c.R()));
    c.each(block, [&](std::int64_t i) {
      const auto w = c.field(block, i);
      std::vector<Profile> ps;
      for (const auto& name : c.cfg.profiles) ps.push_back(make_profile(name, rho, w));
      const auto fr = evolve_profiles(w, ps, n, {K, K});
      for (std::size_t p = 0; p < P; ++p) z[p][i] = static_cast<double>(fr[p].exit(K));
    });
    for (std::size_t p = 0; p < P; ++p) {
      for (std::int64_t i = 0; i < c.R(); ++i) c.sample(block, i, n, double(p), c.cfg.C, z[p][i]);
      tail_checks(c, c.cfg.profiles[p] + " n=" + std::to_string(n), z[p], n);
    }
    ++block;

    // Stationary control along the characteristic.
    const double cr = c.cfg.control_rho;
    const auto kb = static_cast<std::int64_t>(std::floor(characteristics(cr).b * double(n)));
    std::vector<double> zc(c.R());
    c.each(block, [&](std::int64_t i) {
      const auto w = c.field(block, i);
      zc[i] = double(evolve_profile(w, Profile::stationary(cr, WalkSource{w, 0}), n, {kb, kb}).exit(kb));
    });
    for (std::int64_t i = 0; i < c.R(); ++i) c.sample(block, i, n, -1.0, double(kb), zc[i]);
    std::vector<double> rr;
    for (double r = 0.0; r <= 8.0 + 1e-12; r += 0.25) rr.push_back(r);
    const auto curve = tail_curve(SampleSet::of("control", zc), n, 0.0, rr);
    const double slope = tail_slope(curve, 1.0, 6.0, static_cast<std::int64_t>(c.th("min_hits")));
    c.check(Verdict::at_most("control_tail_slope" + tag({{"rho", cr}, {"n", double(n)}}),
                             std::isnan(slope) ? INFINITY : slope, c.th("control_slope")));
    ++block;
  }
}

void run_comparison_audit(Context& c) {
  const std::int64_t n_max = *std::max_element(c.cfg.n.begin(), c.cfg.n.end());
  const double rho_lo = c.cfg.rho.empty() ? 0.3 : *std::min_element(c.cfg.rho.begin(), c.cfg.rho.end());
  const double rho_hi = c.cfg.rho.empty() ? 0.7 : *std::max_element(c.cfg.rho.begin(), c.cfg.rho.end());
  static constexpr ProfileKind kinds[] = {ProfileKind::Wedge,           ProfileKind::Flat,
                                          ProfileKind::Stationary,      ProfileKind::WedgeFlat,
                                          ProfileKind::WedgeStationary, ProfileKind::FlatStationary};
  std::vector<ComparisonAudit> audits(c.R());
  c.each(0, [&](std::int64_t i) {
    const auto w = c.field(0, i);
    std::mt19937_64 rng(mix64(c.cfg.seed ^ mix64(c.id(0, i) + 0x636f6d70ULL)));
    std::uniform_int_distribution<std::int64_t> pick_n(1, n_max);
    std::uniform_int_distribution<int> pick_kind(0, 5), pick_lane(0, 1);
    std::uniform_real_distribution<double> pick_rho(rho_lo, rho_hi);
    const auto n = pick_n(rng);
    std::uniform_int_distribution<std::int64_t> pick_k(-n / 2, n / 2);
    auto draw = [&] {
      const auto kind = kinds[pick_kind(rng)];
      const double rho = pick_rho(rng);
      return Profile::make(kind, rho, WalkSource{w, static_cast<std::uint64_t>(pick_lane(rng))});
    };
    const auto b1 = draw();
    const auto b2 = draw();
    auto k = pick_k(rng), l = pick_k(rng);
    if (k > l) std::swap(k, l);
    audits[i] = comparison_check(w, b1, b2, k, l, n);
  });
  std::int64_t hyp = 0, bad = 0;
  for (std::int64_t i = 0; i < c.R(); ++i) {
    const auto& a = audits[i];
    hyp += a.hypothesis;
    bad += a.violation();
    c.sample(0, i, a.n, double(a.l - a.k), a.hypothesis ? 1 : 0, a.increment2 - a.increment1);
  }
  c.check(Verdict::at_most("comparison_violations", double(bad), c.th("violations")));
  c.check(Verdict::at_least("comparison_hypothesis_cases", double(hyp), c.th("min_hypotheses")));
}

void run_sandwich(Context& c) {
  SandwichOptions opt;
  opt.variant = c.cfg.variant == "sources" ? SandwichVariant::sources : SandwichVariant::local;
  std::int64_t block = 0;
  for (auto n : c.cfg.n) {
    struct Freq {
      double r, f, hw;
    };
    std::vector<Freq> freqs;
    const auto K = scaled_floor(c.cfg.C, n);
    bool exits_written = false;
    for (double r : c.cfg.r) {
      const auto t = tag({{"r", r}, {"n", double(n)}});
      if (!rho_range_ok(r, n)) {
        // rho_n^+ leaves [1/4, 3/4]: the event is not defined.
        c.check(Verdict::at_most("rho_plus_in_range" + t, 0.5 + r / std::cbrt(double(n)), 0.75));
        continue;
      }
      std::vector<SandwichRecord> recs(c.R());
      c.each(block, [&](std::int64_t i) {
        const auto w = c.field(block, i);
        recs[i] = sandwich_event(w, make_profile(c.cfg.profiles.front(), 0.5, w), r, c.cfg.C, n, opt);
      });
      std::int64_t bad = 0, mod_bad = 0, on = 0;
      std::vector<double> miss(c.R());
      for (std::int64_t i = 0; i < c.R(); ++i) {
        const auto& rec = recs[i];
        on += rec.event;
        bad += rec.violations;
        mod_bad += rec.modulus_violations;
        miss[i] = rec.event ? 0.0 : 1.0;
        c.sample(block, i, n, r, c.cfg.C, rec.event ? 1.0 : 0.0);
        if (!exits_written && opt.variant == SandwichVariant::local) {
          c.out.exits.push_back({c.id(block, i), n, 0, rec.z_b_0});
          c.out.exits.push_back({c.id(block, i), n, K, rec.z_b_C});
        }
      }
      exits_written = true;
      c.check(Verdict::at_most("on_event_increment_violations" + t, double(bad), c.th("violations")));
      c.check(Verdict::at_most("on_event_modulus_violations" + t, double(mod_bad), c.th("modulus_violations")));
      const auto m = moment_stats(SampleSet::of("miss", miss), nullptr, BootstrapOptions{1000, c.cfg.seed, 0.95});
      freqs.push_back({r, m.mean_a, m.mean_a_ci.width() / 2.0});
    }
    double worst = 0.0;
    for (std::size_t q = 1; q < freqs.size(); ++q) {
      const double slack = std::hypot(freqs[q].hw, freqs[q - 1].hw);
      worst = std::max(worst, freqs[q].f - freqs[q - 1].f - slack);
    }
    c.check(Verdict::at_most("event_complement_nonincreasing" + tag({{"n", double(n)}}), worst,
                             c.th("monotone_slack")));
    ++block;
  }
}

void run_local_brownian(Context& c, bool kpz) {
  if (!kpz && !c.cfg.gamma) throw ConfigError("sub-kpz needs gamma");
  std::int64_t block = 0;
  for (auto n : c.cfg.n) {
    const auto& xs = c.cfg.x;
    std::vector<double> eps_x;
    for (double x : xs) eps_x.push_back(c.cfg.epsilon * x);
    const auto g_kpz = UGrid::make(c.cfg.C, eps_x, n);
    const auto g_sub = UGrid::make(c.cfg.C, xs, n);
    std::int64_t hi = kpz ? g_kpz.band().k_hi : 0;
    if (c.cfg.gamma) {
      for (double x : xs) hi = std::max(hi, scaled_floor(x, n, *c.cfg.gamma));
    }
    std::vector<std::vector<double>> dk(xs.size(), std::vector<double>(c.R()));
    std::vector<std::vector<double>> ds(xs.size(), std::vector<double>(c.R()));
    c.each(block, [&](std::int64_t i) {
      const auto w = c.field(block, i);
      const auto f = evolve_profile(w, make_profile(c.cfg.profiles.front(), 0.5, w), n, {0, hi});
      if (kpz) {
        const auto d = delta_n(f, n, g_kpz);
        for (std::size_t q = 0; q < xs.size(); ++q) dk[q][i] = d.values[q];
      }
      if (c.cfg.gamma) {
        const auto d = sub_kpz_delta(f, n, *c.cfg.gamma, g_sub);
        for (std::size_t q = 0; q < xs.size(); ++q) ds[q][i] = d.values[q];
      }
    });
    for (std::size_t q = 0; q < xs.size(); ++q) {
      const double x = xs[q];
      if (kpz) {
        const auto t = tag({{"eps", c.cfg.epsilon}, {"x", x}, {"n", double(n)}});
        std::vector<double> scaled(dk[q]);
        for (auto& v : scaled) v /= std::sqrt(c.cfg.epsilon);
        for (std::int64_t i = 0; i < c.R(); ++i) c.sample(block, i, n, x, 0.0, dk[q][i]);
        c.check(variance_check("var_delta_over_eps" + t, scaled, x, c.th("var_rel") * x, c.cfg.seed));
        c.check(ks_gaussian_check("ks_normal" + t, dk[q], c.cfg.epsilon * x, c.th("ks")));
      }
      if (c.cfg.gamma) {
        const double gm = *c.cfg.gamma;
        const auto t = tag({{"gamma", gm}, {"x", x}, {"n", double(n)}});
        for (std::int64_t i = 0; i < c.R(); ++i) c.sample(block, i, n, x, gm, ds[q][i]);
        c.check(variance_check("sub_kpz_var" + t, ds[q], x, c.th("var_rel") * x, c.cfg.seed));
        c.check(ks_gaussian_check("sub_kpz_ks_normal" + t, ds[q], x, c.th("ks")));
      }
    }
    ++block;
  }
}

void run_airy_identity(Context& c) {
  std::int64_t block = 0;
  for (auto n : c.cfg.n) {
    const auto g = UGrid::make(c.cfg.C, c.cfg.u, n);
    std::vector<AirySample> wedge(c.R()), flat(c.R());
    std::vector<double> sheet_res(c.R());
    c.each(block, [&](std::int64_t i) {
      const auto w = c.field(block, i);
      wedge[i] = airy_point_process(AiryKind::wedge, w, n, g);
      flat[i] = airy_point_process(AiryKind::flat, w, n, g);
      if (!c.cfg.v.empty()) sheet_res[i] = sheet_sample(w, n, c.cfg.v, c.cfg.v, c.cfg.C).identity_residual;
    });
    double rw = 0, rf = 0, rs = 0;
    for (std::int64_t i = 0; i < c.R(); ++i) {
      rw = std::max(rw, wedge[i].identity_residual);
      rf = std::max(rf, flat[i].identity_residual);
      rs = std::max(rs, sheet_res[i]);
      for (std::size_t q = 0; q < g.points.size(); ++q) {
        c.sample(block, i, n, 0.0, g.points[q], wedge[i].H.values[q]);
        c.sample(block, i, n, 1.0, g.points[q], flat[i].H.values[q]);
      }
    }
    const auto t = tag({{"n", double(n)}});
    c.check(Verdict::at_most("wedge_identity_residual" + t, rw, c.th("residual")));
    c.check(Verdict::at_most("flat_identity_residual" + t, rf, c.th("residual")));
    if (!c.cfg.v.empty()) c.check(Verdict::at_most("sheet_identity_residual" + t, rs, c.th("residual")));
    ++block;
  }
}

void run_exit_law(Context& c) {
  std::map<std::int64_t, std::vector<double>> by_n;
  std::int64_t block = 0;
  for (auto n : c.cfg.n) {
    std::vector<double> z(c.R());
    c.each(block, [&](std::int64_t i) {
      const auto w = c.field(block, i);
      z[i] = double(evolve_profile(w, make_profile(c.cfg.profiles.front(), 0.5, w), n, {0, 0}).exit(0));
    });
    for (std::int64_t i = 0; i < c.R(); ++i) {
      c.out.exits.push_back({c.id(block, i), n, 0, static_cast<std::int64_t>(z[i])});
    }
    by_n[n] = std::move(z);
    ++block;
  }
  ExitLawOptions opt;
  opt.symmetry_se = c.th("mean_se");
  opt.stability_ks = c.th("ks");
  opt.mass_fraction = c.th("mass");
  opt.mass_radius = c.th("radius");
  for (const auto& [n, z] : by_n) {
    const auto it = by_n.find(2 * n);
    const auto s = SampleSet::of("n=" + std::to_string(n), z);
    SampleSet s2;
    if (it != by_n.end()) s2 = SampleSet::of("n=" + std::to_string(2 * n), it->second);
    const auto law = exit_law_histogram(s, n, it != by_n.end() ? &s2 : nullptr, opt);
    const auto t = tag({{"n", double(n)}});
    auto sym = law.symmetry;
    sym.name += t;
    auto loc = law.localization;
    loc.name += t;
    c.check(sym);
    c.check(loc);
    if (law.stability) {
      auto st = *law.stability;
      st.name += tag({{"n", double(n)}, {"2n", double(2 * n)}});
      c.check(st);
    }
  }
}

std::size_t index_of_zero(const std::vector<double>& g, const char* name) {
  for (std::size_t q = 0; q < g.size(); ++q) {
    if (g[q] == 0.0) return q;
  }
  throw ConfigError(std::string("grid ") + name + " must contain 0");
}

void run_sheet(Context& c, bool additivity) {
  const auto& U = c.cfg.u;
  const auto& V = c.cfg.v;
  const auto u0 = index_of_zero(U, "u"), v0 = index_of_zero(V, "v");
  std::int64_t block = 0;
  for (auto n : c.cfg.n) {
    std::vector<SheetSample> s(c.R());
    c.each(block, [&](std::int64_t i) { s[i] = sheet_sample(c.field(block, i), n, U, V, c.cfg.C); });
    double res = 0.0;
    for (std::int64_t i = 0; i < c.R(); ++i) {
      res = std::max(res, s[i].identity_residual);
      for (std::size_t a = 0; a < U.size(); ++a) {
        for (std::size_t b = 0; b < V.size(); ++b) c.sample(block, i, n, U[a], V[b], s[i].delta_at(a, b));
      }
    }
    c.check(Verdict::at_most("sheet_identity_residual" + tag({{"n", double(n)}}), res, c.th("residual")));
    for (std::size_t a = 0; a < U.size(); ++a) {
      for (std::size_t b = 0; b < V.size(); ++b) {
        const double u = U[a], v = V[b];
        const auto t = tag({{"u", u}, {"v", v}, {"n", double(n)}});
        if (additivity) {
          if (u + v <= 0.0) continue;
          std::vector<double> d(c.R());
          for (std::int64_t i = 0; i < c.R(); ++i) d[i] = s[i].delta_at(a, b) - s[i].delta_at(u0, v0);
          c.check(variance_check("sheet_increment_variance" + t, d, u + v,
                                 c.th("var_rel") * (u + v) + c.th("var_abs"), c.cfg.seed));
        } else {
          if (u <= 0.0 || v <= 0.0) continue;
          std::vector<double> g1(c.R()), g2(c.R());
          for (std::int64_t i = 0; i < c.R(); ++i) {
            g1[i] = s[i].delta_at(a, v0) - s[i].delta_at(u0, v0);
            g2[i] = s[i].delta_at(a, b) - s[i].delta_at(a, v0);
          }
          const auto A = SampleSet::of("gamma", g1), B = SampleSet::of("gamma_u", g2);
          const auto m = moment_stats(A, &B, BootstrapOptions{1000, c.cfg.seed, 0.95});
          auto vd = Verdict::at_most("sheet_increment_abs_corr" + t, std::abs(m.correlation), c.th("corr"));
          vd.ci = std::pair{m.correlation_ci.lo, m.correlation_ci.hi};
          c.check(vd);
        }
      }
    }
    ++block;
  }
}

void run_midpoint(Context& c) {
  const double rho = first_rho(c.cfg);
  std::int64_t block = 0;
  for (auto n : c.cfg.n) {
    const auto A = scaled_floor(1.0, n);
    std::vector<double> i1(c.R()), i2(c.R());
    c.each(block, [&](std::int64_t i) {
      const auto mm = midpoint_models(c.field(block, i), rho, n, {0, A});
      i1[i] = mm.frontier1.value(A).value() - mm.frontier1.value(0).value();
      i2[i] = mm.frontier2.value(A).value() - mm.frontier2.value(0).value();
    });
    for (std::int64_t i = 0; i < c.R(); ++i) {
      c.sample(block, i, n, 1.0, double(A), i1[i]);
      c.sample(block, i, n, 2.0, double(A), i2[i]);
    }
    const auto a = SampleSet::of("forward", i1), b = SampleSet::of("reversed", i2);
    const auto m = moment_stats(a, &b, BootstrapOptions{1000, c.cfg.seed, 0.95});
    auto vd = Verdict::at_most("midpoint_models_abs_corr" + tag({{"rho", rho}, {"n", double(n)}}),
                               std::abs(m.correlation), c.th("corr"));
    vd.ci = std::pair{m.correlation_ci.lo, m.correlation_ci.hi};
    c.check(vd);

    std::vector<std::int64_t> all;
    for (std::int64_t k = 0; k <= A; ++k) all.push_back(k);
    for (double r : c.cfg.r) {
      const auto t = tag({{"r", r}, {"n", double(n)}});
      if (!rho_range_ok(r, n)) {
        c.check(Verdict::at_most("rho_plus_in_range" + t, 0.5 + r / std::cbrt(double(n)), 0.75));
        continue;
      }
      std::vector<MidpointSandwichRecord> recs(c.R());
      c.each(block, [&](std::int64_t i) { recs[i] = midpoint_sandwich(c.field(block, i), r, n, all, all); });
      std::int64_t bad = 0;
      for (std::int64_t i = 0; i < c.R(); ++i) {
        bad += recs[i].violations;
        c.sample(block, i, n, 3.0, r, recs[i].event ? 1.0 : 0.0);
      }
      c.check(Verdict::at_most("midpoint_on_event_violations" + t, double(bad), c.th("violations")));
    }
    ++block;
  }
}

void run_geodesic_midpoint(Context& c) {
  std::int64_t block = 0;
  for (auto n : c.cfg.n) {
    const auto A = scaled_floor(1.0, n);
    const std::int64_t m = n / 2;
    const std::vector<std::int64_t> ks{0, A / 2, A};
    std::vector<std::vector<double>> z(ks.size(), std::vector<double>(c.R()));
    c.each(block, [&](std::int64_t i) {
      const auto w = c.field(block, i);
      for (std::size_t q = 0; q < ks.size(); ++q) z[q][i] = double(geodesic_midpoint(w, 0, ks[q], n, m));
    });
    std::int64_t unordered = 0;
    for (std::int64_t i = 0; i < c.R(); ++i) {
      for (std::size_t q = 0; q < ks.size(); ++q) {
        c.out.exits.push_back({c.id(block, i), n, ks[q], static_cast<std::int64_t>(z[q][i])});
        if (q > 0 && z[q][i] < z[q - 1][i]) ++unordered;
      }
    }
    c.check(Verdict::at_most("midpoint_order_violations" + tag({{"n", double(n)}}), double(unordered),
                             c.th("monotone_violations")));
    for (std::size_t q = 0; q < ks.size(); ++q) {
      c.check(mean_check("midpoint_mean_se" + tag({{"k", double(ks[q])}, {"n", double(n)}}), z[q],
                         double(ks[q]) / 2.0, c.th("mean_se")));
    }
    ++block;
  }
}

// ---------------------------------------------------------------------------

struct Preset {
  PresetInfo info;
  ExperimentConfig defaults;
  std::function<void(Context&)> run;
};

ExperimentConfig base(std::string name, std::vector<std::int64_t> n, std::int64_t replicas,
                      std::map<std::string, double> thresholds) {
  ExperimentConfig cfg;
  cfg.experiment = std::move(name);
  cfg.n = std::move(n);
  cfg.replicas = replicas;
  cfg.thresholds = std::move(thresholds);
  return cfg;
}

const std::vector<Preset>& registry() {
  static const std::vector<Preset> table = [] {
    std::vector<Preset> t;
    auto add = [&t](std::string claim, ExperimentConfig cfg, std::function<void(Context&)> run) {
      t.push_back({{cfg.experiment, std::move(claim)}, std::move(cfg), std::move(run)});
    };
    {
      auto c = base("stationarity", {512}, 10000, {{"ks", 0.02}, {"mean_se", 3}});
      c.rho = {0.4, 0.5, 0.6};
      add("stationary profiles are time invariant: L^s[1]_n - L^s[0]_n ~ Exp(1-rho) - Exp(rho)", c,
          run_stationarity);
    }
    {
      auto c = base("equilibrium-clt", {1024}, 10000, {{"var_abs", 0.05}, {"ks", 0.02}});
      c.rho = {0.5};
      c.u = {0.25, 0.5, 1.0};
      add("equilibrium fluctuations Delta_n^{s_1/2}(u) are Gaussian with variance ~ u", c,
          run_equilibrium_clt);
    }
    {
      auto c = base("localization", {512, 1024}, 10000,
                    {{"tail", 0.02}, {"control_slope", -2.0}, {"min_hits", 50}});
      c.profiles = {"flat", "wedge-flat", "wedge-stationary", "flat-stationary"};
      c.rho = {0.5};
      for (double r = 0.0; r <= 8.0 + 1e-12; r += 0.5) c.r.push_back(r);
      add("exit points localize on the n^{2/3} scale; stationary tails decay like r^-3", c,
          run_localization);
    }
    {
      auto c = base("comparison-audit", {128}, 10000, {{"violations", 0}, {"min_hypotheses", 100}});
      c.rho = {0.3, 0.7};
      add("ordered exits order the increments of two profiles on a shared environment", c,
          run_comparison_audit);
    }
    {
      auto c = base("sandwich", {256}, 10000,
                    {{"violations", 0}, {"modulus_violations", 0}, {"monotone_slack", 0}});
      c.r = {1, 2, 4, 8};
      c.profiles = {"flat"};
      add("on the exit-order event the increments lie between two stationary bridges", c, run_sandwich);
    }
    {
      auto c = base("local-brownian", {4096}, 10000, {{"var_rel", 0.2}, {"ks", 0.05}});
      c.x = {0.25, 0.5, 1.0};
      c.gamma = 1.0 / 3.0;
      c.profiles = {"flat"};
      add("Delta_n(eps x) / sqrt(eps) is close to Brownian motion for small eps", c,
          [](Context& ctx) { run_local_brownian(ctx, true); });
    }
    {
      auto c = base("sub-kpz", {4096}, 10000, {{"var_rel", 0.2}, {"ks", 0.05}});
      c.x = {0.25, 0.5, 1.0};
      c.gamma = 1.0 / 3.0;
      c.profiles = {"flat"};
      add("under sub-KPZ scaling the increments converge to Brownian motion", c,
          [](Context& ctx) { run_local_brownian(ctx, false); });
    }
    {
      auto c = base("airy-identity", {512}, 1000, {{"residual", 1e-9}});
      c.u = {-1.0, -0.5, 0.0, 0.5, 1.0};
      c.v = {0.0, 0.05, 0.1};
      add("Airy recentering identities H(u) = H(0) + 2^{1/6} Delta(2^{2/3} u) hold exactly", c,
          run_airy_identity);
    }
    {
      auto c = base("exit-law", {512, 1024}, 10000,
                    {{"mean_se", 3}, {"ks", 0.05}, {"mass", 0.02}, {"radius", 4}});
      c.profiles = {"flat"};
      add("the flat exit point scaled by 2^{2/3} n^{2/3} has a symmetric, n-stable law", c,
          run_exit_law);
    }
    {
      auto c = base("sheet-additivity", {512}, 4000, {{"var_rel", 0.2}, {"var_abs", 0.01}, {"residual", 1e-9}});
      c.u = {0.0, 0.05, 0.1};
      c.v = {0.0, 0.05, 0.1};
      add("sheet increments Delta(u,v) - Delta(0,0) have variance u + v", c,
          [](Context& ctx) { run_sheet(ctx, true); });
    }
    {
      auto c = base("sheet-independence", {512}, 4000, {{"corr", 0.1}, {"residual", 1e-9}});
      c.u = {0.0, 0.05, 0.1};
      c.v = {0.0, 0.05, 0.1};
      add("source and target sheet increments are independent Brownian motions", c,
          [](Context& ctx) { run_sheet(ctx, false); });
    }
    {
      auto c = base("midpoint-decomposition", {256}, 10000, {{"corr", 0.05}, {"violations", 0}});
      c.rho = {0.5};
      c.r = {0.5, 1.0};
      add("forward and reversed midpoint models are independent and sandwich L_j increments", c,
          run_midpoint);
    }
    {
      auto c = base("geodesic-midpoint", {256}, 2000, {{"mean_se", 3}, {"monotone_violations", 0}});
      add("geodesic midpoints are ordered in the target and centered at the middle", c,
          run_geodesic_midpoint);
    }
    return t;
  }();
  return table;
}

const Preset& find_preset(std::string_view name) {
  for (const auto& p : registry()) {
    if (p.info.name == name) return p;
  }
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

}  // namespace

const std::vector<PresetInfo>& presets() {
  static const std::vector<PresetInfo> infos = [] {
    std::vector<PresetInfo> out;
    for (const auto& p : registry()) out.push_back(p.info);
    return out;
  }();
  return infos;
}

ExperimentConfig preset_config(std::string_view name) { return find_preset(name).defaults; }

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Verdict& v) { return v.pass; });
}

void for_each_replica(std::int64_t count, int workers, std::uint64_t id_base,
                      const std::function<void(std::int64_t)>& body) {
  std::atomic<std::int64_t> next{0};
  std::mutex mu;
  std::int64_t failed = count;
  std::exception_ptr error;
  auto work = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed) {
          failed = i;
          error = std::current_exception();
        }
      }
    }
  };
  const auto extra = std::max<std::int64_t>(0, std::min<std::int64_t>(workers, count) - 1);
  std::vector<std::thread> pool;
  for (std::int64_t t = 0; t < extra; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (!error) return;
  const std::uint64_t replica = id_base + static_cast<std::uint64_t>(failed);
  try {
    std::rethrow_exception(error);
  } catch (const std::exception& e) {
    throw ExperimentError("replica " + std::to_string(replica) + ": " + e.what(), replica);
  } catch (...) {
    throw ExperimentError("replica " + std::to_string(replica) + ": unknown failure", replica);
  }
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto& preset = find_preset(cfg.experiment);
  const auto start = std::chrono::steady_clock::now();
  RunResult out;
  out.report.experiment = cfg.experiment;
  out.report.config_digest = config_digest(cfg);
  Context ctx{cfg, out};
  preset.run(ctx);
  out.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace lpplab
