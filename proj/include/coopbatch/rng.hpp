#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

#include "coopbatch/common.hpp"

namespace coopbatch {

// Counter-based, stateless randomness. Every variate is a pure function of
// (seed, id tuple), so a vertex draws the same number no matter which batch,
// layer pass, or worker evaluates it. Cooperative vs single-worker equality
// and the shared-variate semantics of LABOR-0 both hinge on this.

/// SplitMix64 finalizer; full-avalanche 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t kHashSalt = 0x736f6d6570736575ULL;

/// Incremental form of the id-tuple fold, for hot loops that share a prefix.
inline std::uint64_t hash_init(std::uint64_t seed) { return mix64(seed ^ kHashSalt); }
inline std::uint64_t hash_step(std::uint64_t h, std::uint64_t id) {
  return mix64(h ^ id);
}

/// Hash a seed plus an id tuple down to 64 uniform bits.
inline std::uint64_t hash_bits(std::uint64_t seed,
                               std::initializer_list<std::uint64_t> ids) {
  std::uint64_t h = hash_init(seed);
  for (std::uint64_t id : ids) h = hash_step(h, id);
  return h;
}

inline double uniform_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform draw on [0,1), 53-bit resolution.
inline double hash_uniform(std::uint64_t seed,
                           std::initializer_list<std::uint64_t> ids) {
  return uniform_from_bits(hash_bits(seed, ids));
}

/// Standard normal CDF. |error| well below 1e-7 across the real line.
double phi(double x);

/// Standard normal quantile (inverse of phi). Defined on (0,1).
double inverse_phi(double p);

/// Normal draw from raw hash bits (half-ulp offset keeps the uniform in (0,1)).
inline double normal_from_bits(std::uint64_t bits) {
  return inverse_phi((static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53);
}

/// Deterministic standard-normal draw for (seed, ids).
double std_normal(std::uint64_t seed, std::initializer_list<std::uint64_t> ids);

/// Interpolated uniform variate: Phi(cos(c*pi/2)*n1 + sin(c*pi/2)*n2) with
/// n1, n2 the per-id normals under z1, z2. c=0 and c=1 reproduce the pure
/// z1 / z2 variates exactly. Marginally U(0,1) for every fixed c.
double interp_variate(std::uint64_t z1, std::uint64_t z2, double c,
                      std::initializer_list<std::uint64_t> ids);

inline constexpr std::uint64_t kKappaInfinity =
    std::numeric_limits<std::uint64_t>::max();

// Randomness stream tags (first id component), so distinct consumers never
// share draws.
inline constexpr std::uint64_t kStreamNs = 1;
inline constexpr std::uint64_t kStreamLabor = 2;
inline constexpr std::uint64_t kStreamRwStep = 3;
inline constexpr std::uint64_t kStreamEdgeCoin = 5;
inline constexpr std::uint64_t kStreamEdgeNeg = 6;
inline constexpr std::uint64_t kStreamPartition = 7;
inline constexpr std::uint64_t kStreamSeedDraw = 8;
inline constexpr std::uint64_t kStreamFeature = 9;
inline constexpr std::uint64_t kStreamLabel = 10;
inline constexpr std::uint64_t kStreamWeightInit = 11;
inline constexpr std::uint64_t kStreamFresh = 12;
inline constexpr std::uint64_t kStreamGenerate = 13;

/// Seed rotation state for dependent minibatches. With period kappa, seed z2
/// fades in with contribution c = (iteration mod kappa)/kappa; at each group
/// boundary z1 takes over z2's role and a fresh z2 is derived. kappa =
/// kKappaInfinity never rotates (fully static variates), kappa = 1 rotates
/// every step (fully independent variates).
struct SeedSchedule {
  std::uint64_t kappa = 1;
  std::uint64_t z1 = 0;
  std::uint64_t z2 = 0;
  std::uint64_t iteration = 0;

  static SeedSchedule make(std::uint64_t kappa, std::uint64_t root_seed);

  double contribution() const {
    if (kappa == kKappaInfinity) return 0.0;
    return static_cast<double>(iteration % kappa) / static_cast<double>(kappa);
  }

  /// Interpolation only matters for 2 <= kappa < inf; kappa 1 and inf pin
  /// c = 0, where the plain hash stream is used instead.
  bool smoothing_active() const {
    return kappa != kKappaInfinity && kappa >= 2;
  }
};

SeedSchedule schedule_advance(SeedSchedule s);

}  // namespace coopbatch
