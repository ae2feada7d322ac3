#pragma once

#include <cstdint>

namespace qforce {

// Counter-based randomness: every draw is a pure function of (seed, stream, counters),
// so results do not depend on evaluation order or worker count.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (mix64(b) + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t c0,
                                  std::uint64_t c1 = 0) {
  std::uint64_t h = hash_combine(mix64(seed), stream);
  h = hash_combine(h, c0);
  h = hash_combine(h, c1);
  return mix64(h);
}

/// Uniform in [0, 1) with 53 random bits.
inline double unit_double(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

/// Small sequential generator for test catalogs; splitmix64.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }
  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t next_in(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double next_unit() { return unit_double(next()); }

 private:
  std::uint64_t state_;
};

}  // namespace qforce
