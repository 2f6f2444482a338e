#pragma once

#include <complex>
#include <cstdint>

namespace speclab {

/// Counter-based generator (splitmix64 over a keyed counter).  All
/// randomness in the project flows through this type; per-instance
/// streams are derived as Rng(seed, instance_index), which makes
/// ensemble runs reproducible and extendable without replaying
/// earlier instances.
class Rng {
public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ (0x9e3779b97f4a7c15ull * (stream + 1)))), ctr_(0) {}

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ull * ++ctr_); }

  /// Uniform in [0,1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (fully deterministic, no
  /// implementation-defined library distributions).
  double normal() {
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  std::complex<double> complex_normal() {
    return {normal() * 0.7071067811865475244, normal() * 0.7071067811865475244};
  }

  /// Uniform on the closed unit disk.
  std::complex<double> unit_disk() {
    double r = std::sqrt(uniform()), t = 6.283185307179586477 * uniform();
    return {r * std::cos(t), r * std::sin(t)};
  }

  std::uint64_t below(std::uint64_t n) { return n ? next_u64() % n : 0; }

private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t ctr_;
};

} // namespace speclab
