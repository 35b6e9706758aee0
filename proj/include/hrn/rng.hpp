#pragma once

#include <cstdint>
#include <random>

namespace hrn {

/// Seeded generator with platform-independent uniform and normal streams.
///
/// std::normal_distribution is implementation-defined, so normals come from
/// Box-Muller over the (fully specified) mt19937_64 bit stream instead.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

private:
  std::mt19937_64 engine_;
};

} // namespace hrn
