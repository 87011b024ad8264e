#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace kcm {

// Counter-based SplitMix64 stream. Every consumer derives its own stream
// from (seed, tags...) via seed_hash, so draws are order-independent across
// replicates and safe to fan out over threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53-bit resolution.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_uniform();
  }

  // Standard normal via Box-Muller; pairs are cached.
  double next_normal() {
    if (has_cache_) {
      has_cache_ = false;
      return cache_;
    }
    double u1 = 0.0;
    do {
      u1 = next_uniform();
    } while (u1 <= 0.0);
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    cache_ = r * std::sin(angle);
    has_cache_ = true;
    return r * std::cos(angle);
  }

 private:
  std::uint64_t state_;
  bool has_cache_ = false;
  double cache_ = 0.0;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Deterministic seed derivation: seed_hash(master, r) names replicate r's
// stream, seed_hash(rep_seed, "boot", b) names bootstrap draw b's stream.
inline std::uint64_t seed_hash(std::uint64_t a, std::uint64_t b) {
  return detail::mix64(a + 0x9E3779B97F4A7C15ULL * (b + 1));
}

inline std::uint64_t seed_hash(std::uint64_t a, std::string_view tag) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return seed_hash(a, h);
}

inline std::uint64_t seed_hash(std::uint64_t a, std::string_view tag,
                               std::uint64_t b) {
  return seed_hash(seed_hash(a, tag), b);
}

}  // namespace kcm
