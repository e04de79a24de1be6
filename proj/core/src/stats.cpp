#include "lpplab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lpplab/errors.hpp"

namespace lpplab {

namespace {

void require_nonempty(std::span<const double> s, const char* who) {
  if (s.empty()) throw DomainError(std::string(who) + ": empty sample");
}

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Unbiased variance; 0 for a single point.
double var_of(std::span<const double> x, double m) {
  if (x.size() < 2) return 0.0;
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double cov_of(std::span<const double> a, double ma, std::span<const double> b, double mb) {
  if (a.size() < 2) return 0.0;
  double s = 0.0;
  for (std::size_t q = 0; q < a.size(); ++q) s += (a[q] - ma) * (b[q] - mb);
  return s / static_cast<double>(a.size() - 1);
}

double corr_from(double cov, double va, double vb) {
  return va > 0.0 && vb > 0.0 ? cov / std::sqrt(va * vb) : 0.0;
}

Interval percentile(std::vector<double> v, double level) {
  std::sort(v.begin(), v.end());
  const double alpha = (1.0 - level) / 2.0;
  auto at = [&](double p) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return {at(alpha), at(1.0 - alpha)};
}

}  // namespace

Verdict Verdict::at_most(std::string name, double metric, double threshold) {
  Verdict v;
  v.name = std::move(name);
  v.metric = metric;
  v.threshold = threshold;
  v.pass = metric <= threshold;
  return v;
}

Verdict Verdict::at_least(std::string name, double metric, double threshold) {
  Verdict v;
  v.name = std::move(name);
  v.metric = metric;
  v.threshold = threshold;
  v.pass = metric >= threshold;
  return v;
}

double normal_cdf(double x, double variance) {
  if (!(variance > 0.0)) throw DomainError("normal_cdf: variance must be positive");
  return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance));
}

double stationary_increment_cdf(double x, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("stationary_increment_cdf: rho must lie in (0,1)");
  return x >= 0.0 ? 1.0 - rho * std::exp(-(1.0 - rho) * x) : (1.0 - rho) * std::exp(rho * x);
}

double ks_distance(std::span<const double> sample, const std::function<double(double)>& cdf) {
  require_nonempty(sample, "ks_distance");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t q = 0; q < s.size(); ++q) {
    const double f = cdf(s[q]);
    d = std::max({d, static_cast<double>(q + 1) / n - f, f - static_cast<double>(q) / n});
  }
  return d;
}

double ks_two_sample_distance(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, "ks_two_sample");
  require_nonempty(b, "ks_two_sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t p = 0, q = 0;
  double d = 0.0;
  while (p < x.size() && q < y.size()) {
    const double t = std::min(x[p], y[q]);
    while (p < x.size() && x[p] <= t) ++p;
    while (q < y.size() && y[q] <= t) ++q;
    d = std::max(d, std::abs(static_cast<double>(p) / nx - static_cast<double>(q) / ny));
  }
  return d;
}

Verdict ks_to_cdf(const SampleSet& s, const std::function<double(double)>& cdf, double threshold,
                  std::string name) {
  return Verdict::at_most(std::move(name), ks_distance(s.values, cdf), threshold);
}

Verdict ks_to_gaussian(const SampleSet& s, double variance, double threshold) {
  require_nonempty(s.values, "ks_to_gaussian");
  if (!(variance > 0.0)) throw DomainError("ks_to_gaussian: variance must be positive");
  return ks_to_cdf(s, [variance](double x) { return normal_cdf(x, variance); }, threshold,
                   "ks_gaussian:" + s.label);
}

Verdict ks_two_sample(const SampleSet& a, const SampleSet& b, double threshold) {
  return Verdict::at_most("ks_two_sample:" + a.label + "/" + b.label,
                          ks_two_sample_distance(a.values, b.values), threshold);
}

double MomentStats::se_a() const {
  return count > 0 ? std::sqrt(var_a / static_cast<double>(count)) : 0.0;
}

MomentStats moment_stats(const SampleSet& a, const SampleSet* b, const BootstrapOptions& opt) {
  require_nonempty(a.values, "moment_stats");
  if (b && b->size() != a.size()) {
    throw DomainError("moment_stats: length mismatch (" + std::to_string(a.size()) + " vs " +
                      std::to_string(b->size()) + ")");
  }
  if (opt.resamples < 1) throw DomainError("moment_stats: resamples must be positive");
  const std::span<const double> x = a.values;
  MomentStats m;
  m.count = x.size();
  m.has_b = b != nullptr;
  m.mean_a = mean_of(x);
  m.var_a = var_of(x, m.mean_a);
  if (b) {
    const std::span<const double> y = b->values;
    m.mean_b = mean_of(y);
    m.var_b = var_of(y, m.mean_b);
    m.covariance = cov_of(x, m.mean_a, y, m.mean_b);
    m.correlation = corr_from(m.covariance, m.var_a, m.var_b);
  }

  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  std::vector<double> ma, va, mb, vb, rc;
  std::vector<double> xs(x.size()), ys(b ? x.size() : 0);
  for (int rep = 0; rep < opt.resamples; ++rep) {
    for (std::size_t q = 0; q < x.size(); ++q) {
      const std::size_t p = pick(rng);
      xs[q] = x[p];
      if (b) ys[q] = b->values[p];
    }
    const double mx = mean_of(xs);
    ma.push_back(mx);
    va.push_back(var_of(xs, mx));
    if (b) {
      const double my = mean_of(ys);
      const double vy = var_of(ys, my);
      mb.push_back(my);
      vb.push_back(vy);
      rc.push_back(corr_from(cov_of(xs, mx, ys, my), va.back(), vy));
    }
  }
  m.mean_a_ci = percentile(std::move(ma), opt.level);
  m.var_a_ci = percentile(std::move(va), opt.level);
  if (b) {
    m.mean_b_ci = percentile(std::move(mb), opt.level);
    m.var_b_ci = percentile(std::move(vb), opt.level);
    m.correlation_ci = percentile(std::move(rc), opt.level);
  }
  return m;
}

bool TailCurve::monotone() const {
  for (std::size_t q = 1; q < R.size(); ++q) {
    if (R[q] > R[q - 1]) return false;
  }
  return true;
}

TailCurve tail_curve(const SampleSet& exits, std::int64_t n, double C, std::vector<double> r) {
  require_nonempty(exits.values, "tail_curve");
  for (std::size_t q = 0; q < r.size(); ++q) {
    if (!(r[q] >= 0.0) || (q > 0 && r[q] < r[q - 1])) {
      throw DomainError("tail_curve: r grid must be nonnegative and nondecreasing");
    }
  }
  TailCurve c;
  c.n = n;
  c.C = C;
  c.total = exits.size();
  const double n23 = n_two_thirds(n);
  for (double rr : r) {
    std::int64_t hits = 0;
    for (double z : exits.values) hits += std::abs(z) >= rr * n23;
    c.counts.push_back(hits);
    c.R.push_back(static_cast<double>(hits) / static_cast<double>(c.total));
  }
  c.r = std::move(r);
  return c;
}

double tail_slope(const TailCurve& c, double r_lo, double r_hi, std::int64_t min_hits) {
  std::vector<double> lx, ly;
  for (std::size_t q = 0; q < c.r.size(); ++q) {
    if (c.r[q] < r_lo || c.r[q] > r_hi || c.r[q] <= 0.0 || c.counts[q] < min_hits) continue;
    lx.push_back(std::log(c.r[q]));
    ly.push_back(std::log(c.R[q]));
  }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mx = mean_of(lx), my = mean_of(ly);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t q = 0; q < lx.size(); ++q) {
    sxy += (lx[q] - mx) * (ly[q] - my);
    sxx += (lx[q] - mx) * (lx[q] - mx);
  }
  return sxy / sxx;
}

double modulus(std::span<const double> u, std::span<const double> x, double delta) {
  if (u.size() != x.size()) throw DomainError("modulus: grid and values differ in length");
  const double tol = 1e-12 * std::max(1.0, std::abs(delta));
  double w = 0.0;
  for (std::size_t a = 0; a < u.size(); ++a) {
    for (std::size_t b = a + 1; b < u.size(); ++b) {
      if (std::abs(u[b] - u[a]) > delta + tol) continue;
      w = std::max(w, std::abs(x[b] - x[a]));
    }
  }
  return w;
}

double modulus(const ProcessSample& p, double delta) { return modulus(p.u, p.values, delta); }

Histogram::Histogram(double lo, double hi, std::size_t bins) : lo_(lo), hi_(hi), counts_(bins) {
  if (!(hi > lo) || bins == 0) throw DomainError("Histogram: need lo < hi and bins > 0");
}

void Histogram::add(double x) {
  if (x < lo_) {
    ++under_;
  } else if (x >= hi_) {
    ++over_;
  } else {
    auto b = static_cast<std::size_t>((x - lo_) / bin_width());
    ++counts_[std::min(b, counts_.size() - 1)];
  }
}

void Histogram::merge(const Histogram& o) {
  if (o.lo_ != lo_ || o.hi_ != hi_ || o.counts_.size() != counts_.size()) {
    throw DomainError("Histogram::merge: binnings differ");
  }
  for (std::size_t q = 0; q < counts_.size(); ++q) counts_[q] += o.counts_[q];
  under_ += o.under_;
  over_ += o.over_;
}

std::uint64_t Histogram::total() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), under_ + over_);
}

std::vector<double> Histogram::density() const {
  std::vector<double> d(counts_.size(), 0.0);
  const auto t = total();
  if (t == 0) return d;
  for (std::size_t q = 0; q < d.size(); ++q) {
    d[q] = static_cast<double>(counts_[q]) / (static_cast<double>(t) * bin_width());
  }
  return d;
}

namespace {

std::vector<double> scale_exits(const SampleSet& s, std::int64_t n) {
  const double unit = std::cbrt(4.0) * n_two_thirds(n);  // 2^{2/3} n^{2/3}
  std::vector<double> out;
  out.reserve(s.size());
  for (double z : s.values) out.push_back(z / unit);
  return out;
}

}  // namespace

ExitLaw exit_law_histogram(const SampleSet& exits, std::int64_t n, const SampleSet* exits_2n,
                           const ExitLawOptions& opt) {
  require_nonempty(exits.values, "exit_law_histogram");
  ExitLaw law;
  law.histogram = Histogram(-opt.range, opt.range, opt.bins);
  law.scaled = scale_exits(exits, n);
  for (double x : law.scaled) law.histogram.add(x);
  law.mean = mean_of(law.scaled);
  law.se = std::sqrt(var_of(law.scaled, law.mean) / static_cast<double>(law.scaled.size()));

  const double z = law.se > 0.0 ? std::abs(law.mean) / law.se : 0.0;
  law.symmetry = Verdict::at_most("exit_mean_symmetry_se", z, opt.symmetry_se);
  law.symmetry.error = law.se;

  std::size_t far = 0;
  for (double x : law.scaled) far += std::abs(x) > opt.mass_radius;
  law.localization = Verdict::at_most("exit_mass_beyond_radius",
                                      static_cast<double>(far) / static_cast<double>(law.scaled.size()),
                                      opt.mass_fraction);

  if (exits_2n) {
    require_nonempty(exits_2n->values, "exit_law_histogram");
    const auto other = scale_exits(*exits_2n, 2 * n);
    law.stability = Verdict::at_most("exit_law_ks_n_vs_2n", ks_two_sample_distance(law.scaled, other),
                                     opt.stability_ks);
  }
  return law;
}

}  // namespace lpplab
