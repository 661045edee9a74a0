#pragma once

#include <cmath>
#include <cstdint>

namespace shrink {

// Counter-addressable pseudo-random streams.
//
// Every consumer of randomness in this library draws from a ChunkRng keyed by
// (seed, stream, chunk).  Work is partitioned into fixed-size chunks *before*
// it is assigned to threads, and each chunk owns an independent generator
// state, so results are bit-for-bit reproducible for a given seed no matter
// how many workers run.

inline constexpr std::uint64_t kChunkSamples = 1u << 16;

/// SplitMix64 finalizer; bijective 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Identifies one logical random stream of an engine invocation.
struct RngKey {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// xoshiro256++ generator seeded from (key, chunk) via SplitMix64 expansion.
class ChunkRng {
 public:
  ChunkRng(RngKey key, std::uint64_t chunk) noexcept {
    std::uint64_t h = mix64(mix64(mix64(key.seed) ^ key.stream) ^ chunk);
    for (auto& word : state_) {
      h = mix64(h);
      word = h;
    }
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal deviate (Marsaglia polar method, one value cached).
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace shrink
