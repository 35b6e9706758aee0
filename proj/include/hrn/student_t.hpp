#pragma once

namespace hrn {

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
double incomplete_beta(double a, double b, double x);

/// Student t cumulative distribution with `df` > 0 degrees of freedom.
double t_cdf(double t, double df);

/// Inverse of t_cdf: p in (0, 1), absolute accuracy 1e-6 or better.
double t_quantile(double p, double df);

} // namespace hrn
