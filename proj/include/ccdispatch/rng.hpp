#pragma once

// Counter-based random numbers.
//
// Every draw is a pure function of (seed, stream, counter...) built from the
// SplitMix64 finalizer (Steele, Lea & Flood 2014):
//
//   z += 0x9E3779B97F4A7C15
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   z ^= z >> 31
//
// Keys are folded in order: h = mix(seed); h = mix(h ^ key) for each key.
// Uniforms take the top 53 bits. Normals use the Box-Muller cosine branch
// on the uniforms at counters (2k, 2k+1). Identical keys give identical
// values on any platform with IEEE doubles and a correctly rounded libm.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace ccd::rng {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += kGoldenGamma;
  z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31U);
}

[[nodiscard]] constexpr std::uint64_t hash_keys(
    std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = splitmix64(seed);
  for (const std::uint64_t k : keys) h = splitmix64(h ^ k);
  return h;
}

/// Uniform in [0, 1) with 53 random bits.
[[nodiscard]] constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11U) * 0x1.0p-53;
}

/// Well-known stream identifiers. Streams keep independent consumers from
/// sharing draws when they share a seed.
enum class Stream : std::uint64_t {
  kTruthNoise = 1,
  kForecastNoise = 2,
  kReplication = 3,
  kTest = 99,
};

[[nodiscard]] constexpr double uniform(std::uint64_t seed, Stream stream,
                                       std::uint64_t a,
                                       std::uint64_t b = 0) noexcept {
  return to_unit(hash_keys(seed, {static_cast<std::uint64_t>(stream), a, b}));
}

/// Standard normal draw addressed by (seed, stream, a, b).
[[nodiscard]] inline double normal(std::uint64_t seed, Stream stream,
                                   std::uint64_t a, std::uint64_t b = 0) noexcept {
  const auto s = static_cast<std::uint64_t>(stream);
  const double u1 = 1.0 - to_unit(hash_keys(seed, {s, a, 2 * b}));  // (0, 1]
  const double u2 = to_unit(hash_keys(seed, {s, a, 2 * b + 1}));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Sequential generator over a single stream, for test fixtures and
/// random-instance generators.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed, Stream stream = Stream::kTest) noexcept
      : seed_(seed), stream_(stream) {}

  double uniform() noexcept { return rng::uniform(seed_, stream_, counter_++); }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double normal() noexcept { return rng::normal(seed_, stream_, counter_++); }

  /// Integer in [lo, hi].
  int integer(int lo, int hi) noexcept {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(
                    hash_keys(seed_, {static_cast<std::uint64_t>(stream_), counter_++}) % span);
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

private:
  std::uint64_t seed_;
  Stream stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace ccd::rng
