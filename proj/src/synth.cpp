#include "hrn/synth.hpp"

#include "hrn/error.hpp"
#include "hrn/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hrn {

std::optional<SynthFamily> parse_family(std::string_view name) {
  if (name == "schwefel1d")
    return SynthFamily::Schwefel1d;
  if (name == "bohachevsky2d")
    return SynthFamily::Bohachevsky2d;
  return std::nullopt;
}

const char *family_name(SynthFamily family) {
  switch (family) {
  case SynthFamily::Schwefel1d:
    return "schwefel1d";
  case SynthFamily::Bohachevsky2d:
    return "bohachevsky2d";
  }
  return "unknown";
}

Index family_dim(SynthFamily family) {
  return family == SynthFamily::Schwefel1d ? 1 : 2;
}

std::vector<std::pair<double, double>> default_range(SynthFamily family) {
  if (family == SynthFamily::Schwefel1d)
    return {{-500.0, 500.0}};
  return {{-100.0, 100.0}, {-100.0, 100.0}};
}

void SynthSpec::validate() const {
  if (n < 2)
    fail(ErrorCode::Input, "synthetic sample needs n >= 2");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    fail(ErrorCode::Input, "noise sigma must be finite and nonnegative");
  if (!range.empty()) {
    if (static_cast<Index>(range.size()) != family_dim(family))
      fail(ErrorCode::Input, std::string(family_name(family)) + " needs " +
                                 std::to_string(family_dim(family)) +
                                 " range pairs");
    for (const auto &[lo, hi] : range)
      if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        fail(ErrorCode::Input, "range bounds must be finite with lower < upper");
  }
}

double eval_true(SynthFamily family, const Eigen::Ref<const Vector> &x) {
  if (x.size() != family_dim(family))
    fail(ErrorCode::Input, std::string(family_name(family)) + " takes " +
                               std::to_string(family_dim(family)) +
                               "-dimensional points");
  using std::numbers::pi;
  if (family == SynthFamily::Schwefel1d)
    return 418.9829 - x[0] * std::sin(std::sqrt(std::abs(x[0])));
  return x[0] * x[0] + 2.0 * x[1] * x[1] - 0.3 * std::cos(3.0 * pi * x[0]) -
         0.4 * std::cos(4.0 * pi * x[1]) + 0.7;
}

Vector eval_true_rows(SynthFamily family, const Matrix &X) {
  Vector out(X.rows());
  for (Index i = 0; i < X.rows(); ++i)
    out[i] = eval_true(family, Vector(X.row(i).transpose()));
  return out;
}

Dataset sample(const SynthSpec &spec) {
  spec.validate();
  const auto range = spec.range.empty() ? default_range(spec.family) : spec.range;
  const Index d = family_dim(spec.family);
  Rng rng(spec.seed);
  Dataset D;
  D.X.resize(spec.n, d);
  for (Index i = 0; i < spec.n; ++i)
    for (Index j = 0; j < d; ++j)
      D.X(i, j) = rng.uniform(range[static_cast<std::size_t>(j)].first,
                              range[static_cast<std::size_t>(j)].second);
  D.Y = eval_true_rows(spec.family, D.X);
  for (Index i = 0; i < spec.n; ++i)
    D.Y[i] += spec.noise_sigma * rng.normal();
  return D;
}

} // namespace hrn
