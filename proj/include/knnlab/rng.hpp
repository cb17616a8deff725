#pragma once

#include <cmath>
#include <cstdint>

// Deterministic, splittable random streams. Every randomized routine in the
// library takes an explicit 64-bit seed; replications derive independent
// streams from (master_seed, tag...) via derive(). No std::random engines or
// distributions are used anywhere: their output is implementation-defined,
// and we need byte-identical results for a fixed seed across rebuilds.

namespace knnlab::rng {

// SplitMix64 output function (Steele/Lea/Flood). Good avalanche; used both
// for seeding and for deriving stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a stream seed from a master seed and up to three tags (e.g. the
// sample size, the replication index, a phase marker). Distinct tag tuples
// give independent streams for all practical purposes.
inline std::uint64_t derive(std::uint64_t master, std::uint64_t a,
                            std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = mix64(master);
  s = mix64(s ^ mix64(a + 0x0b4c1d2e3f4a5b6cULL));
  s = mix64(s ^ mix64(b + 0x1f83d9abfb41bd6bULL));
  s = mix64(s ^ mix64(c + 0x5be0cd19137e2179ULL));
  return s;
}

// xoshiro256++ (Blackman/Vigna), state seeded through SplitMix64.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) {
      sm += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = sm;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      w = z ^ (z >> 31);
    }
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

  // Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the second deviate of each pair is
  // cached, so the sequence is a pure function of the seed and call count.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 6.283185307179586476925286766559 * u2;
    spare_ = rad * std::sin(ang);
    has_spare_ = true;
    return rad * std::cos(ang);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace knnlab::rng
