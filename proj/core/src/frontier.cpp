// Antidiagonal sweeps. This translation unit holds the hot loops; it is built
// with host SIMD when LPPLAB_NATIVE is on and never with FMA contraction, so
// results do not depend on how the loops are vectorized.

#include <algorithm>
#include <cassert>
#include <limits>
#include <string>

#include "lpplab/errors.hpp"
#include "lpplab/lpp.hpp"
#include "sweep.hpp"

namespace lpplab {

namespace {

constexpr double kBottom = -std::numeric_limits<double>::infinity();

// Row of cells d = lo, lo+2, ..., hi stored with one bottom pad on each side:
// cell p lives at index p + 1.
struct PaddedRow {
  std::int64_t lo = 0;
  std::int64_t hi = -2;
  std::vector<double> val;
  std::vector<std::int64_t> lab;

  std::int64_t count() const noexcept { return hi < lo ? 0 : (hi - lo) / 2 + 1; }

  void reset(std::int64_t new_lo, std::int64_t new_hi, bool labeled) {
    lo = new_lo;
    hi = new_hi;
    const auto n = static_cast<std::size_t>(count() + 2);
    val.assign(n, kBottom);
    if (labeled) lab.assign(n, 0);
  }
  double* data() noexcept { return val.data() + 1; }
  std::int64_t* labels() noexcept { return lab.data() + 1; }
};

// Index (in padded storage) of the d-1 neighbour of the first cell of `cur`.
std::int64_t neighbour_base(const PaddedRow& prev, std::int64_t cur_lo) {
  const std::int64_t base = (cur_lo - 1 - prev.lo) / 2 + 1;
  assert(((cur_lo - 1 - prev.lo) % 2) == 0);
  return base;
}

// cur[p] = w[p] + max(prev[d-1], prev[d+1]); on a tie the larger label wins.
void relax_labeled(const double* __restrict w, const double* __restrict pv,
                   const std::int64_t* __restrict pl, double* __restrict cv,
                   std::int64_t* __restrict cl, std::int64_t count) {
  for (std::int64_t p = 0; p < count; ++p) {
    const double a = pv[p];
    const double b = pv[p + 1];
    const std::int64_t la = pl[p];
    const std::int64_t lb = pl[p + 1];
    // Written as selects so that the loop vectorizes.
    const std::int64_t tie = la > lb ? la : lb;
    const std::int64_t not_b = b < a ? la : tie;
    cl[p] = b > a ? lb : not_b;
    cv[p] = (a < b ? b : a) + w[p];
  }
}

void relax_plain(const double* __restrict w, const double* __restrict pv, double* __restrict cv,
                 std::int64_t count) {
  for (std::int64_t p = 0; p < count; ++p) {
    const double a = pv[p];
    const double b = pv[p + 1];
    cv[p] = (b >= a ? b : a) + w[p];
  }
}

// As relax_plain, recording 1 when the d+1 neighbour was taken (ties go to d+1).
void relax_bits(const double* __restrict w, const double* __restrict pv, double* __restrict cv,
                std::uint8_t* __restrict bits, std::int64_t count) {
  for (std::int64_t p = 0; p < count; ++p) {
    const double a = pv[p];
    const double b = pv[p + 1];
    const bool take_b = b >= a;
    cv[p] = (take_b ? b : a) + w[p];
    bits[p] = take_b ? 1 : 0;
  }
}

void fill_row(const RowFiller& rows, std::int64_t t, std::int64_t lo, std::int64_t count,
              std::vector<double>& w) {
  w.resize(static_cast<std::size_t>(count));
  // Cell d = lo is site ((t + lo) / 2, (t - lo) / 2); d + 2 is (i + 1, j - 1).
  rows((t + lo) / 2, (t - lo) / 2, std::span<double>(w.data(), w.size()));
}

void check_rectangle(Site x, Site y, const char* who) {
  if (!precedes(x, y)) {
    throw DomainError(std::string(who) + ": requires x <= y componentwise");
  }
  if (x.time() < 0) {
    throw DomainError(std::string(who) + ": source must satisfy i + j >= 0");
  }
}

struct RectangleBand {
  Site x, y;
  std::int64_t lo(std::int64_t t) const { return std::max(2 * x.i - t, t - 2 * y.j); }
  std::int64_t hi(std::int64_t t) const { return std::min(2 * y.i - t, t - 2 * x.j); }
};

}  // namespace

RowFiller bulk_rows(const WeightField& w) {
  return [w](std::int64_t i0, std::int64_t j0, std::span<double> out) {
    w.fill_antidiagonal(i0, j0, out);
  };
}

// ---------------------------------------------------------------------------
// Profile evolution

std::vector<Frontier> evolve_profiles(const RowFiller& rows, std::span<const Profile> profiles,
                                      std::int64_t origin_half_time, std::int64_t n,
                                      TargetBand targets) {
  const std::int64_t m0 = origin_half_time;
  if (n - m0 < 1) throw DomainError("evolve_profile: need n >= 1 steps beyond the boundary");
  if (m0 < 0) throw DomainError("evolve_profile: boundary antidiagonal must satisfy t >= 0");
  if (targets.k_hi < targets.k_lo) throw DomainError("evolve_profile: empty target band");

  const std::int64_t half_steps = n - m0;
  const std::int64_t j_lo = targets.k_lo - half_steps;
  const std::int64_t j_hi = targets.k_hi + half_steps;
  const std::int64_t t0 = 2 * m0;
  const std::int64_t t1 = 2 * n;

  const std::size_t np = profiles.size();
  std::vector<PaddedRow> cur(np), nxt(np);
  for (std::size_t q = 0; q < np; ++q) {
    cur[q].reset(2 * j_lo, 2 * j_hi, true);
    const std::int64_t count = cur[q].count();
    profiles[q].fill(j_lo, std::span<double>(cur[q].data(), static_cast<std::size_t>(count)));
    bool any_finite = false;
    for (std::int64_t p = 0; p < count; ++p) {
      cur[q].labels()[p] = j_lo + p;
      any_finite |= cur[q].data()[p] != kBottom;
    }
    if (!any_finite) {
      throw NoPathError("evolve_profile: profile '" + std::string(to_string(profiles[q].kind())) +
                        "' is bottom on the whole feasible range [" + std::to_string(j_lo) + ", " +
                        std::to_string(j_hi) + "]");
    }
  }

  std::vector<double> w;
  for (std::int64_t t = t0 + 1; t <= t1; ++t) {
    const std::int64_t s = t - t0;
    const std::int64_t lo = 2 * j_lo + s;
    const std::int64_t hi = 2 * j_hi - s;
    const std::int64_t count = (hi - lo) / 2 + 1;
    fill_row(rows, t, lo, count, w);
    for (std::size_t q = 0; q < np; ++q) {
      nxt[q].reset(lo, hi, true);
      const std::int64_t base = neighbour_base(cur[q], lo);
      relax_labeled(w.data(), cur[q].val.data() + base, cur[q].lab.data() + base,
                    nxt[q].data(), nxt[q].labels(), count);
      std::swap(cur[q], nxt[q]);
    }
  }

  std::vector<Frontier> out;
  out.reserve(np);
  for (std::size_t q = 0; q < np; ++q) {
    const auto count = static_cast<std::size_t>(cur[q].count());
    std::vector<double> values(cur[q].data(), cur[q].data() + count);
    std::vector<std::int64_t> exits(cur[q].labels(), cur[q].labels() + count);
    out.emplace_back(t1, targets, std::move(values), std::move(exits));
  }
  return out;
}

std::vector<Frontier> evolve_profiles(const WeightField& w, std::span<const Profile> profiles,
                                      std::int64_t n, TargetBand targets) {
  if (n < 1) throw DomainError("evolve_profile: n must be >= 1");
  return evolve_profiles(bulk_rows(w), profiles, 0, n, targets);
}

Frontier evolve_profile(const WeightField& w, const Profile& p, std::int64_t n, TargetBand targets) {
  auto fronts = evolve_profiles(w, std::span<const Profile>(&p, 1), n, targets);
  return std::move(fronts.front());
}

// ---------------------------------------------------------------------------
// Reverse sweep from an initial row at t = t_top down to t = 0.
//
// The initial row holds values that already include the weights on that
// row; every intermediate row adds its own weight; the final row t = 0 adds
// none. Labels carry the index of the initial cell the optimum came from.

namespace detail {

ReverseResult reverse_to_boundary(const RowFiller& rows, std::int64_t t_top, std::int64_t top_lo,
                                  std::span<const double> top_values,
                                  std::span<const std::int64_t> top_labels,
                                  std::int64_t target_lo, std::int64_t target_hi) {
  const std::int64_t top_hi = top_lo + 2 * (static_cast<std::int64_t>(top_values.size()) - 1);
  PaddedRow cur, nxt;
  cur.reset(top_lo, top_hi, true);
  std::copy(top_values.begin(), top_values.end(), cur.data());
  std::copy(top_labels.begin(), top_labels.end(), cur.labels());

  std::vector<double> w;
  ReverseResult res;
  for (std::int64_t t = t_top - 1; t >= 0; --t) {
    const std::int64_t depth = t_top - t;
    const std::int64_t lo = std::max(top_lo - depth, target_lo - t);
    const std::int64_t hi = std::min(top_hi + depth, target_hi + t);
    if (hi < lo) return res;  // nothing reachable
    const std::int64_t count = (hi - lo) / 2 + 1;
    if (t > 0) {
      fill_row(rows, t, lo, count, w);
    } else {
      w.assign(static_cast<std::size_t>(count), 0.0);
    }
    nxt.reset(lo, hi, true);
    const std::int64_t base = neighbour_base(cur, lo);
    relax_labeled(w.data(), cur.val.data() + base, cur.lab.data() + base, nxt.data(),
                  nxt.labels(), count);
    std::swap(cur, nxt);
  }
  res.lo = cur.lo;
  res.hi = cur.hi;
  res.values.assign(cur.data(), cur.data() + cur.count());
  res.labels.assign(cur.labels(), cur.labels() + cur.count());
  return res;
}

}  // namespace detail

std::vector<double> lpp_from_boundary_sources(const RowFiller& rows, Site target,
                                              std::int64_t j_lo, std::int64_t j_hi) {
  if (j_hi < j_lo) throw DomainError("lpp_from_boundary_sources: empty source range");
  if (target.time() < 1) throw DomainError("lpp_from_boundary_sources: target must satisfy i + j >= 1");
  std::vector<double> out(static_cast<std::size_t>(j_hi - j_lo + 1), kBottom);

  // The target's own weight is part of every path.
  std::vector<double> wy(1);
  rows(target.i, target.j, std::span<double>(wy));
  const std::int64_t lab = 0;
  auto res = detail::reverse_to_boundary(rows, target.time(), target.diag(),
                                         std::span<const double>(wy),
                                         std::span<const std::int64_t>(&lab, 1), 2 * j_lo, 2 * j_hi);
  for (std::size_t p = 0; p < res.values.size(); ++p) {
    const std::int64_t j = (res.lo + 2 * static_cast<std::int64_t>(p)) / 2;
    if (j >= j_lo && j <= j_hi) out[static_cast<std::size_t>(j - j_lo)] = res.values[p];
  }
  return out;
}

std::vector<double> lpp_from_boundary_sources(const WeightField& w, Site target, std::int64_t j_lo,
                                              std::int64_t j_hi) {
  return lpp_from_boundary_sources(bulk_rows(w), target, j_lo, j_hi);
}

// ---------------------------------------------------------------------------
// Point-to-point

double point_lpp(const WeightField& w, Site x, Site y, Direction direction) {
  check_rectangle(x, y, "point_lpp");
  if (x == y) return 0.0;
  const RowFiller rows = bulk_rows(w);
  const RectangleBand band{x, y};
  std::vector<double> wrow;
  PaddedRow cur, nxt;

  if (direction == Direction::forward) {
    cur.reset(x.diag(), x.diag(), false);
    cur.data()[0] = 0.0;
    for (std::int64_t t = x.time() + 1; t <= y.time(); ++t) {
      const std::int64_t lo = band.lo(t), hi = band.hi(t);
      const std::int64_t count = (hi - lo) / 2 + 1;
      fill_row(rows, t, lo, count, wrow);
      nxt.reset(lo, hi, false);
      relax_plain(wrow.data(), cur.val.data() + neighbour_base(cur, lo), nxt.data(), count);
      std::swap(cur, nxt);
    }
    return cur.data()[0];
  }

  // Reverse: R(z) = max over successors e of (w_{z+e} + R(z+e)), R(y) = 0.
  // Rows hold w + R, except the final row (z = x) which holds R.
  cur.reset(y.diag(), y.diag(), false);
  cur.data()[0] = w.weight_at(y);
  for (std::int64_t t = y.time() - 1; t >= x.time(); --t) {
    const std::int64_t lo = band.lo(t), hi = band.hi(t);
    const std::int64_t count = (hi - lo) / 2 + 1;
    if (t > x.time()) {
      fill_row(rows, t, lo, count, wrow);
    } else {
      wrow.assign(static_cast<std::size_t>(count), 0.0);
    }
    nxt.reset(lo, hi, false);
    relax_plain(wrow.data(), cur.val.data() + neighbour_base(cur, lo), nxt.data(), count);
    std::swap(cur, nxt);
  }
  return cur.data()[0];
}

Geodesic geodesic(const WeightField& w, Site x, Site y) {
  check_rectangle(x, y, "geodesic");
  Geodesic g;
  if (x == y) {
    g.sites.push_back(x);
    return g;
  }
  const RowFiller rows = bulk_rows(w);
  const RectangleBand band{x, y};
  const std::int64_t t0 = x.time();
  const std::int64_t rows_n = y.time() - t0;

  // One bit per cell, rows packed back to back.
  std::vector<std::uint64_t> row_offset(static_cast<std::size_t>(rows_n) + 1, 0);
  for (std::int64_t s = 1; s <= rows_n; ++s) {
    const std::int64_t t = t0 + s;
    row_offset[static_cast<std::size_t>(s)] =
        row_offset[static_cast<std::size_t>(s - 1)] +
        static_cast<std::uint64_t>((band.hi(t) - band.lo(t)) / 2 + 1);
  }
  std::vector<std::uint64_t> words(static_cast<std::size_t>((row_offset.back() + 63) / 64), 0);

  std::vector<double> wrow;
  std::vector<std::uint8_t> bytes;
  PaddedRow cur, nxt;
  cur.reset(x.diag(), x.diag(), false);
  cur.data()[0] = 0.0;
  for (std::int64_t s = 1; s <= rows_n; ++s) {
    const std::int64_t t = t0 + s;
    const std::int64_t lo = band.lo(t), hi = band.hi(t);
    const std::int64_t count = (hi - lo) / 2 + 1;
    fill_row(rows, t, lo, count, wrow);
    bytes.resize(static_cast<std::size_t>(count));
    nxt.reset(lo, hi, false);
    relax_bits(wrow.data(), cur.val.data() + neighbour_base(cur, lo), nxt.data(), bytes.data(),
               count);
    const std::uint64_t off = row_offset[static_cast<std::size_t>(s - 1)];
    for (std::int64_t p = 0; p < count; ++p) {
      if (bytes[static_cast<std::size_t>(p)]) {
        const std::uint64_t bit = off + static_cast<std::uint64_t>(p);
        words[bit / 64] |= std::uint64_t{1} << (bit % 64);
      }
    }
    std::swap(cur, nxt);
  }

  g.sites.resize(static_cast<std::size_t>(rows_n) + 1);
  std::int64_t d = y.diag();
  for (std::int64_t s = rows_n; s >= 1; --s) {
    const std::int64_t t = t0 + s;
    g.sites[static_cast<std::size_t>(s)] = Site{(t + d) / 2, (t - d) / 2};
    const std::int64_t p = (d - band.lo(t)) / 2;
    const std::uint64_t bit = row_offset[static_cast<std::size_t>(s - 1)] + static_cast<std::uint64_t>(p);
    const bool from_right = (words[bit / 64] >> (bit % 64)) & 1U;
    d += from_right ? 1 : -1;
  }
  g.sites[0] = x;
  assert(d == x.diag());
  return g;
}

}  // namespace lpplab
