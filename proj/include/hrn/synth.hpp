#pragma once

#include "hrn/types.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace hrn {

enum class SynthFamily { Schwefel1d, Bohachevsky2d };

std::optional<SynthFamily> parse_family(std::string_view name);
const char *family_name(SynthFamily family);
Index family_dim(SynthFamily family);
/// [-500, 500] for Schwefel, [-100, 100]^2 for Bohachevsky.
std::vector<std::pair<double, double>> default_range(SynthFamily family);

struct SynthSpec {
  SynthFamily family = SynthFamily::Schwefel1d;
  Index n = 0;
  double noise_sigma = 0.0;
  std::vector<std::pair<double, double>> range;  // empty: default_range
  std::uint64_t seed = 0;

  void validate() const;
};

/// Schwefel: 418.9829 - x sin(sqrt|x|).
/// Bohachevsky: x^2 + 2y^2 - 0.3 cos(3 pi x) - 0.4 cos(4 pi y) + 0.7.
double eval_true(SynthFamily family, const Eigen::Ref<const Vector> &x);
Vector eval_true_rows(SynthFamily family, const Matrix &X);

/// Uniform X over the range, Y = f(X) + N(0, noise_sigma^2).
Dataset sample(const SynthSpec &spec);

} // namespace hrn
