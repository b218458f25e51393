#pragma once

#include <cmath>
#include <cstdint>

#include "biphoton/grid.hpp"

namespace biphoton {

// Counter-derived splittable RNG built on the SplitMix64 mixing function
// (Steele/Lea/Flood; Vigna's fixed-increment variant). Every consumer owns a
// Stream derived from (seed, key...) so frame generation is reproducible
// independent of thread count and evaluation order. All samplers below are
// written out explicitly (no std::*_distribution) so that streams are
// byte-stable across standard libraries and platforms.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class Stream {
 public:
  explicit Stream(std::uint64_t state) : state_(state) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix64(state_);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1], safe as a log() argument.
  double next_open() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Derives an independent stream from a seed and up to three keys. Each key is
// folded through the SplitMix64 finalizer, so (seed, a, b, c) tuples map to
// well-separated states.
inline Stream derive_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                            std::uint64_t c = 0) {
  std::uint64_t h = mix64(seed + kGolden);
  h = mix64(h ^ (a + 0x1000000001b3ull));
  h = mix64(h ^ (b + 0x100000001b3ull));
  h = mix64(h ^ (c + 0xcbf29ce484222325ull));
  return Stream(h);
}

// Stream roles within one exposure.
enum class StreamRole : std::uint64_t {
  PairCount = 1,
  PairPositions = 2,
  Medium = 3,
  Detector = 4,
};

inline Stream frame_stream(std::uint64_t seed, std::int64_t frame, StreamRole role,
                           std::uint64_t sub = 0) {
  return derive_stream(seed, static_cast<std::uint64_t>(frame),
                       static_cast<std::uint64_t>(role), sub);
}

// Standard normal via Box-Muller (two uniforms per draw, no cached spare, so
// consumption per call is fixed).
inline double sample_normal(Stream& rng) {
  const double u1 = rng.next_open();
  const double u2 = rng.next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

inline Vec2 sample_normal2(Stream& rng, double sigma) {
  const double u1 = rng.next_open();
  const double u2 = rng.next_double();
  const double r = sigma * std::sqrt(-2.0 * std::log(u1));
  const double phi = 6.283185307179586476925287 * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

inline double sample_exponential(Stream& rng, double mean) {
  return -mean * std::log(rng.next_open());
}

namespace detail {
// Knuth's product-of-uniforms method; exact for small means.
inline std::int64_t poisson_knuth(Stream& rng, double lambda) {
  const double limit = std::exp(-lambda);
  std::int64_t k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= rng.next_double();
  } while (p > limit);
  return k - 1;
}
}  // namespace detail

// Poisson sampler, exact for any mean: large means are split into a sum of
// independent small-mean draws (Poisson additivity) to keep Knuth's method in
// its numerically safe range.
inline std::int64_t sample_poisson(Stream& rng, double lambda) {
  if (!(lambda > 0.0)) return 0;
  std::int64_t total = 0;
  while (lambda > 16.0) {
    total += detail::poisson_knuth(rng, 16.0);
    lambda -= 16.0;
  }
  total += detail::poisson_knuth(rng, lambda);
  return total;
}

// Binomial by explicit Bernoulli trials; n is photons-per-pixel scale here.
inline int sample_binomial(Stream& rng, int n, double p) {
  int k = 0;
  for (int i = 0; i < n; ++i) {
    if (rng.next_double() < p) ++k;
  }
  return k;
}

// Sum of n Exponential(mean) variates: the EM-register output charge for n
// input photoelectrons in the high-gain limit.
inline double sample_gain_counts(Stream& rng, int n_electrons, double gain) {
  double counts = 0.0;
  for (int i = 0; i < n_electrons; ++i) counts += sample_exponential(rng, gain);
  return counts;
}

}  // namespace biphoton
