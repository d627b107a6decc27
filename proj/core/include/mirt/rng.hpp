#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "mirt/tensor.hpp"

namespace mirt {

/// Fixed stream offsets so independent tasks never share random numbers.
enum class Stream : std::uint64_t {
  kKtDraw = 1ull << 32,
  kKtCoverage = 2ull << 32,
  kSymbolSample = 3ull << 32,
  kEllipticity = 4ull << 32,
  kNoise = 5ull << 32,
  kRandomField = 6ull << 32,
};

inline std::uint64_t stream_id(Stream base, std::uint64_t index) {
  return static_cast<std::uint64_t>(base) + index;
}

/// Counter-based generator: the n-th draw of (seed, stream) is a pure function of
/// (seed, stream, n), so draws are reproducible regardless of evaluation order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ull))) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ull * ++counter_); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Vec3 unit_vector() {
    const double z = uniform(-1.0, 1.0);
    const double phi = uniform(0.0, 2.0 * std::numbers::pi);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {rho * std::cos(phi), rho * std::sin(phi), z};
  }

  /// Uniform point in the ball of given center and radius.
  Vec3 in_ball(const Vec3& center, double radius) {
    const double r = radius * std::cbrt(uniform());
    return center + r * unit_vector();
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace mirt
