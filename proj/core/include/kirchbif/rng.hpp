#ifndef KIRCHBIF_RNG_HPP
#define KIRCHBIF_RNG_HPP

#include <cstdint>
#include <random>

namespace kirchbif {

/// Deterministic random stream. std::mt19937_64 has a standard-defined
/// sequence; doubles are produced from raw bits (the distribution classes
/// are implementation-defined and would break byte-reproducibility).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform in [-1, 1).
  double symmetric() { return 2.0 * uniform01() - 1.0; }

private:
  std::mt19937_64 gen_;
};

} // namespace kirchbif

#endif
