#ifndef ROBORD_RNG_HPP
#define ROBORD_RNG_HPP

#include <cstdint>
#include <random>

#include "robord/links.hpp"

namespace robord {

/// SplitMix64 finalizer; used to turn (seed, replication, role) triples into
/// well-separated engine seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Reproducible random stream. The mt19937_64 engine sequence is fixed by
/// the standard and all variate transforms here are explicit (53-bit
/// uniforms, inverse-CDF normals), so results depend only on the triple that
/// seeded the stream, never on execution order or platform library details.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t replication = 0,
                     std::uint64_t role = 0)
      : engine_(mix64(mix64(mix64(seed) ^ replication) ^ (role << 1))) {}

  /// Uniform on the open interval (0,1).
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal by inverse transform through the probit quantile.
  double normal() { return link_quantile(LinkKind::Probit, uniform01()); }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Uniform integer in [0, n), rejection-sampled so every value is equally
  /// likely.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace robord

#endif  // ROBORD_RNG_HPP
