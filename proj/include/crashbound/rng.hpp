#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>

namespace crashbound {

/// SplitMix64: a counter-based generator whose n-th output is a fixed mix of
/// seed + n * 0x9e3779b97f4a7c15. Identical streams in any language; test
/// vectors live in tests/unit/rng_test.cpp.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n) without modulo bias. n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::uint64_t state_;
};

/// Seed for an independent sub-stream, e.g. one per network in a corpus.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  SplitMix64 g(seed ^ (stream * 0xd1b54a32d192ed03ULL));
  return g.next();
}

/// Normal(mean, stddev) via the Box-Muller transform. Both values of each
/// pair are used, cosine branch first.
class NormalSampler {
 public:
  NormalSampler(double mean, double stddev) noexcept : mean_(mean), stddev_(stddev) {}

  double operator()(SplitMix64& rng) {
    if (spare_) {
      const double z = *spare_;
      spare_.reset();
      return mean_ + stddev_ * z;
    }
    const double u1 = 1.0 - rng.uniform();  // (0, 1]
    const double u2 = rng.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    return mean_ + stddev_ * (r * std::cos(theta));
  }

 private:
  double mean_;
  double stddev_;
  std::optional<double> spare_;
};

}  // namespace crashbound
