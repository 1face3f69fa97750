#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ensra {

/// Independent random streams derived from one seed. Each consumer of
/// randomness draws from its own stream so that, for example, forecast
/// corruption never perturbs the true trace.
enum class Stream : std::uint64_t {
  kTopology = 1,
  kInitialLocation = 2,
  kMobility = 3,
  kChannel = 4,
  kArrival = 5,
  kForecast = 6,
  kMonteCarlo = 7,
};

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

/// Uniform double in [0, 1) with 53 random bits; portable across standard
/// library implementations, unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int uniform_int(Rng& rng, int n) {
  return static_cast<int>(uniform01(rng) * n);
}

/// Rayleigh sample with scale 1/sqrt(2), so E[xi^2] = 1.
inline double rayleigh_unit_power(Rng& rng) {
  return std::sqrt(-std::log1p(-uniform01(rng)));
}

}  // namespace ensra
