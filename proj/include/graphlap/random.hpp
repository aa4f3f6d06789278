#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace graphlap {

/// splitmix64 output finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of replication `index` derived from `base_seed`. Part of the
/// reproducibility contract: changing it changes every published run.
///
///   mix_seed(b, k) = splitmix64(splitmix64(b) + 0x9E3779B97F4A7C15 * (k + 1))
///
/// with all arithmetic modulo 2^64. Stream k depends on (b, k) only.
constexpr std::uint64_t mix_seed(std::uint64_t base_seed,
                                 std::uint64_t index) noexcept {
  return splitmix64(splitmix64(base_seed) +
                    0x9E3779B97F4A7C15ULL * (index + 1));
}

/// Random stream used by all samplers. The engine is std::mt19937_64, whose
/// output sequence is fixed by the standard; the variate transforms are
/// written out here because the std:: distributions are implementation
/// defined and would break cross-platform reproducibility.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal variate (Box-Muller, cosine branch only).
  double normal() {
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

private:
  std::mt19937_64 engine_;
};

} // namespace graphlap
