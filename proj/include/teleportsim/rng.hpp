#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace tsim {

// Hand-rolled generators so every sampled value is bit-identical across
// platforms and worker counts (std::normal_distribution is not pinned by the
// standard). xoshiro256++ seeded through splitmix64, one stream per
// (seed, stream) pair.

struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 sm{seed ^ (0x6a09e667f3bcc909ULL + 0x9e3779b97f4a7c15ULL * stream)};
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform in [0, 1) with 53-bit resolution
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller; draws two uniforms per call, fully stateless per call.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  double exponential(double mean) {
    double u = uniform();
    while (u <= 0) u = uniform();
    return -mean * std::log(u);
  }

  // Knuth; intended for small means (per-pulse photon numbers).
  unsigned poisson_small(double mean) {
    const double limit = std::exp(-mean);
    unsigned k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace tsim
