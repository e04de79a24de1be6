#pragma once

// Stateless exponential environment.
//
// Every passage time is a pure function of (master seed, replica, stream,
// site). Nothing is materialized; a replica's whole environment is the
// 64-bit key pair held by WeightField.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace lpplab {

struct Site {
  std::int64_t i = 0;
  std::int64_t j = 0;

  constexpr std::int64_t time() const noexcept { return i + j; }
  constexpr std::int64_t diag() const noexcept { return i - j; }

  friend constexpr bool operator==(const Site&, const Site&) = default;
  friend constexpr auto operator<=>(const Site&, const Site&) = default;
};

/// Componentwise order x <= y used for up-right reachability.
constexpr bool precedes(const Site& x, const Site& y) noexcept {
  return x.i <= y.i && x.j <= y.j;
}

/// Lattice point [k]_n = (n + k, n - k) on the antidiagonal i + j = 2n.
constexpr Site antidiagonal_site(std::int64_t k, std::int64_t n) noexcept {
  return Site{n + k, n - k};
}

enum class Stream : std::uint8_t { bulk = 0, boundary_1 = 1, boundary_2 = 2 };

struct EnvKey {
  std::uint64_t master_seed = 0;
  std::uint64_t replica_id = 0;
  Stream stream = Stream::bulk;

  friend constexpr bool operator==(const EnvKey&, const EnvKey&) = default;
};

/// Bijective 64-bit finalizer (splitmix64).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

/// -ln(y) for y in (0, 1], built only from IEEE basic operations so the
/// scalar path and any vectorized path agree bit for bit.
double neg_log_unit(double y) noexcept;

/// Exp(1) variate from 64 random bits by inverse CDF, U in [0,1) -> -ln(1-U).
double exp1_from_bits(std::uint64_t bits) noexcept;

/// Keyed hash stream: two 64-bit words derived from an EnvKey.
struct StreamKey {
  std::uint64_t a = 0;
  std::uint64_t b = 0;

  static StreamKey derive(const EnvKey& key) noexcept;
  std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix64(mix64(counter * 0x9e3779b97f4a7c15ULL + a) ^ b);
  }
};

/// The random environment of one replica: i.i.d. Exp(1) passage times on
/// {i + j > 0} plus two boundary streams of i.i.d. Exp(1/2) variates.
class WeightField {
 public:
  WeightField() : WeightField(0, 0) {}
  WeightField(std::uint64_t master_seed, std::uint64_t replica_id);

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t replica_id() const noexcept { return replica_id_; }
  EnvKey key(Stream s = Stream::bulk) const noexcept {
    return EnvKey{master_seed_, replica_id_, s};
  }

  /// Passage time at s. Throws DomainError when s.i + s.j <= 0.
  double weight_at(Site s) const;

  /// Weights of the sites (i0 + p, j0 - p), p = 0..out.size()-1, i.e. a run
  /// of consecutive sites along one antidiagonal. Caller guarantees that
  /// i0 + j0 > 0.
  void fill_antidiagonal(std::int64_t i0, std::int64_t j0,
                         std::span<double> out) const noexcept;

  /// Independent Exp(1/2) pair (from streams boundary_1 and boundary_2).
  /// `lane` selects one of many independent boundary sequences.
  std::pair<double, double> boundary_exp_pair(std::int64_t index,
                                              std::uint64_t lane = 0) const noexcept;

 private:
  std::uint64_t master_seed_;
  std::uint64_t replica_id_;
  StreamKey bulk_;
  StreamKey boundary1_;
  StreamKey boundary2_;
};

/// Counter encoding of a site: both coordinates as 32-bit two's complement.
constexpr std::uint64_t site_counter(std::int64_t i, std::int64_t j) noexcept {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(j));
}

}  // namespace lpplab
