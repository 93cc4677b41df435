#pragma once

#include <array>
#include <cstdint>

namespace msde {

/// xoshiro256++ generator seeded through SplitMix64. Chosen over the
/// standard-library engines because its output is pinned by the algorithm,
/// not by the implementation, so seeded runs reproduce bit-exactly on any
/// platform.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    // SplitMix64 expansion of the seed into the four state words.
    std::uint64_t z = seed;
    for (auto& s : state_) {
      z += 0x9E3779B97F4A7C15ULL;
      std::uint64_t w = z;
      w = (w ^ (w >> 30)) * 0xBF58476D1CE4E5B9ULL;
      w = (w ^ (w >> 27)) * 0x94D049BB133111EBULL;
      s = w ^ (w >> 31);
    }
  }

  std::uint64_t next() {
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

  /// Uniform double in the open interval (0, 1).
  double uniform01() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via the Marsaglia polar method. Deterministic for a
  /// given stream; pairs are cached.
  double normal();

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Seed for replicate `index` derived from a base seed. The multiplier is an
/// odd 64-bit constant, so the map index -> seed is injective and the streams
/// never collide.
inline std::uint64_t derive_replicate_seed(std::uint64_t base_seed, std::uint64_t index) {
  return base_seed ^ (index * 0x9E3779B97F4A7C15ULL);
}

}  // namespace msde
