#pragma once

#include <cmath>
#include <cstdint>

// Small deterministic RNG with per-path streams: each path derives its own
// xoshiro256++ state from (seed, path index) via splitmix64, so samples do
// not depend on how paths are distributed over threads.

namespace gapflow {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t sm = seed ^ (0x6a09e667f3bcc909ULL + stream * 0x3c6ef372fe94f82bULL);
    for (auto& word : s_) word = splitmix64(sm);
    have_normal_ = false;
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

  // uniform in (0,1]
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  // uniform in (-1,1)
  double uniform_sym() {
    return (static_cast<double>(static_cast<std::int64_t>(next_u64()) >> 10)) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  // Marsaglia polar method; caches the second deviate.
  double normal() {
    if (have_normal_) {
      have_normal_ = false;
      return cached_;
    }
    double u, v, s;
    do {
      u = uniform_sym();
      v = uniform_sym();
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * f;
    have_normal_ = true;
    return u * f;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
  double cached_ = 0.0;
  bool have_normal_;
};

}  // namespace gapflow
