#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace marketforge {

// splitmix64 finalizer; good avalanche, cheap, stable across platforms.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Pure seed derivation for sub-streams: sweep cells take (n_da, trial),
// per-agent child generators take (agent_id, 0). Grid distinctness is
// checked in tests.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h + a);
  h = splitmix64(h + b);
  return h;
}

// Single seeded generator stream. All distribution mapping is done here,
// on raw 64-bit output, so sequences are identical across standard library
// implementations. Draw counts are fixed per call: uniform01/uniform_int/
// exponential consume one 64-bit draw, normal consumes two.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // u in [0, 1), 53-bit resolution
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // u in [lo, hi)
  double uniform_real(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  // integer in [lo, hi] inclusive, multiply-shift over the span
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
    const auto wide = static_cast<unsigned __int128>(next_u64()) * span;
    return lo + static_cast<std::int64_t>(wide >> 64);
  }

  // -m * ln(1 - u); expectation m, exact 0 for the degenerate m = 0
  double exponential(double mean) {
    if (mean == 0.0) return 0.0;
    return -mean * std::log1p(-uniform01());
  }

  // Box-Muller, cosine branch; sigma is the standard deviation
  double normal(double sigma) {
    if (sigma == 0.0) return 0.0;
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return sigma * r * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace marketforge
