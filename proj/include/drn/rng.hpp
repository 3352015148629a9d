#pragma once

#include <cstdint>

// Counter-based uniform generation: every uniform is a pure function of
// (seed, key), so draws do not depend on enumeration order, thread count
// or how many other draws happened before. One environment seed plus a
// stable per-edge (or per-site, per-replica) key reproduces the same
// number everywhere.

namespace drn::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Stateless hash of (seed, key) -> 64 random bits.
inline constexpr std::uint64_t hash2(std::uint64_t seed, std::uint64_t key) {
  std::uint64_t h = mix64(seed + kGolden);
  h = mix64(h ^ (key * kGolden + 0x2545f4914f6cdd1dULL));
  return mix64(h + key);
}

// Uniform in [0, 1) with 53 random mantissa bits.
inline constexpr double uniform(std::uint64_t seed, std::uint64_t key) {
  return static_cast<double>(hash2(seed, key) >> 11) * 0x1.0p-53;
}

// Derives an independent stream seed, e.g. one per Monte Carlo replica.
inline constexpr std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index) {
  return hash2(seed ^ 0xa02bdbf7bb3c0a7ULL, index);
}

// Sequential stream on top of the counter scheme; each walk/replica owns one.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() { return hash2(seed_, counter_++); }
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // 64-bit multiply-shift; bias is negligible for the n used here.
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace drn::rng
