#pragma once

#include <cstdint>

namespace tmbench {

// SplitMix64. Small, fast, and easy to reproduce in other languages, which
// keeps generated datasets portable. Each (seed, index, field) triple opens
// an independent stream so inserting a new draw never shifts later ones.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased draw in [0, n) via 128-bit multiply with rejection.
  uint64_t below(uint64_t n) {
    uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    uint64_t lo = static_cast<uint64_t>(m);
    if (lo < n) {
      uint64_t thresh = (0 - n) % n;
      while (lo < thresh) {
        x = next();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  // Inclusive range draw.
  uint64_t range(uint64_t lo, uint64_t hi) { return lo + below(hi - lo + 1); }

 private:
  uint64_t state_;
};

inline uint64_t mix64(uint64_t x) {
  SplitMix64 g(x);
  return g.next();
}

// Stream key derivation: hash seed, fold in index, fold in field tag.
inline SplitMix64 stream(uint64_t seed, uint64_t index, uint64_t field) {
  return SplitMix64(mix64(mix64(mix64(seed) ^ index) ^ field));
}

}  // namespace tmbench
