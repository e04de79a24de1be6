#include "lpplab/env.hpp"

#include <bit>
#include <string>

#include "lpplab/errors.hpp"

namespace lpplab {

namespace {

constexpr double kLn2 = 0.6931471805599453094;
constexpr std::uint64_t kSqrtHalfBits = 0x3fe6a09e667f3bcdULL;  // sqrt(1/2)
constexpr std::uint64_t kMantissaMask = 0x000fffffffffffffULL;

// Branch-free body shared by the scalar and the row kernels. The mantissa is
// renormalized into [sqrt(1/2), sqrt(2)) by an integer offset so the atanh
// series argument stays below 0.1716.
inline double neg_log_body(double y) noexcept {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(y);
  const std::uint64_t shifted = bits - kSqrtHalfBits;
  const std::int64_t exponent = static_cast<std::int64_t>(shifted) >> 52;
  const double m = std::bit_cast<double>((shifted & kMantissaMask) + kSqrtHalfBits);
  const double f = (m - 1.0) / (m + 1.0);
  const double f2 = f * f;
  const double series =
      f2 * (1.0 / 3 + f2 * (1.0 / 5 + f2 * (1.0 / 7 + f2 * (1.0 / 9 + f2 * (1.0 / 11 +
      f2 * (1.0 / 13 + f2 * (1.0 / 15 + f2 * (1.0 / 17 + f2 * (1.0 / 19)))))))));
  const double log_m = 2.0 * f + 2.0 * f * series;
  return -(log_m + static_cast<double>(exponent) * kLn2);
}

// U = (bits >> 11) 2^-53 in [0,1); 1 - U is exact in double.
inline double one_minus_uniform(std::uint64_t bits) noexcept {
  const std::int64_t top = static_cast<std::int64_t>(bits >> 11);
  return static_cast<double>((std::int64_t{1} << 53) - top) * 0x1.0p-53;
}

std::uint64_t stream_tag(Stream s) noexcept {
  return 0x5157a7e000000000ULL | static_cast<std::uint64_t>(s);
}

}  // namespace

double neg_log_unit(double y) noexcept { return neg_log_body(y); }

double exp1_from_bits(std::uint64_t bits) noexcept {
  return neg_log_body(one_minus_uniform(bits));
}

StreamKey StreamKey::derive(const EnvKey& key) noexcept {
  const std::uint64_t seed = mix64(key.master_seed ^ 0x6a09e667f3bcc909ULL);
  const std::uint64_t rep = mix64(seed + mix64(key.replica_id + 0xbb67ae8584caa73bULL));
  StreamKey out;
  out.a = mix64(rep ^ stream_tag(key.stream));
  out.b = mix64(out.a + 0x3c6ef372fe94f82bULL);
  return out;
}

WeightField::WeightField(std::uint64_t master_seed, std::uint64_t replica_id)
    : master_seed_(master_seed),
      replica_id_(replica_id),
      bulk_(StreamKey::derive(EnvKey{master_seed, replica_id, Stream::bulk})),
      boundary1_(StreamKey::derive(EnvKey{master_seed, replica_id, Stream::boundary_1})),
      boundary2_(StreamKey::derive(EnvKey{master_seed, replica_id, Stream::boundary_2})) {}

double WeightField::weight_at(Site s) const {
  if (s.i + s.j <= 0) {
    throw DomainError("weight_at: site (" + std::to_string(s.i) + "," + std::to_string(s.j) +
                      ") is on or below the boundary antidiagonal");
  }
  return exp1_from_bits(bulk_.bits(site_counter(s.i, s.j)));
}

void WeightField::fill_antidiagonal(std::int64_t i0, std::int64_t j0,
                                    std::span<double> out) const noexcept {
  const std::uint64_t a = bulk_.a;
  const std::uint64_t b = bulk_.b;
  double* __restrict dst = out.data();
  const std::int64_t count = static_cast<std::int64_t>(out.size());
  for (std::int64_t p = 0; p < count; ++p) {
    const std::uint64_t counter = site_counter(i0 + p, j0 - p);
    const std::uint64_t bits = mix64(mix64(counter * 0x9e3779b97f4a7c15ULL + a) ^ b);
    dst[p] = neg_log_body(one_minus_uniform(bits));
  }
}

std::pair<double, double> WeightField::boundary_exp_pair(std::int64_t index,
                                                         std::uint64_t lane) const noexcept {
  const std::uint64_t counter = site_counter(static_cast<std::int64_t>(lane), index);
  // Exp(1/2) has mean 2.
  return {2.0 * exp1_from_bits(boundary1_.bits(counter)),
          2.0 * exp1_from_bits(boundary2_.bits(counter))};
}

}  // namespace lpplab
