#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace satseg {

// SplitMix64 mixing step.
constexpr uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline uint64_t hash_str(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Small counter-free generator (xorshift-style over a SplitMix64-seeded
// state). Substreams are derived by hashing, so parallel consumers drawing
// from distinct substreams are order-independent.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(mix64(seed ^ 0x5851f42d4c957f2dull)) {
    if (state_ == 0) state_ = 0x9e3779b97f4a7c15ull;
  }

  // Named substream: deterministic function of (this seed, label, index).
  Rng substream(std::string_view label, uint64_t index = 0) const {
    return Rng(substream_seed(label, index));
  }

  uint64_t substream_seed(std::string_view label, uint64_t index = 0) const {
    return mix64(origin_ ^ mix64(hash_str(label)) ^ mix64(index + 1));
  }

  uint64_t next_u64() {
    uint64_t x = state_;
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    state_ = x;
    return x * 0x2545f4914f6cdd1dull;
  }

  uint32_t next_u32() { return static_cast<uint32_t>(next_u64() >> 32); }

  // Uniform integer in [0, n), n > 0. Multiply-shift bound, bias < 2^-32.
  uint32_t uniform_int(uint32_t n) {
    return static_cast<uint32_t>((uint64_t(next_u32()) * n) >> 32);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; consumes two uniforms per pair, caches the second.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 1e-300) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  uint64_t state_;
  uint64_t origin_ = state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace satseg
