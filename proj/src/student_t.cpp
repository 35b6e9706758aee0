#include "hrn/student_t.hpp"

#include "hrn/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace hrn {

namespace {

constexpr int kMaxIterations = 200000;

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny)
    d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny)
      d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny)
      c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny)
      d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny)
      c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps)
      return h;
  }
  fail(ErrorCode::Internal, "incomplete beta continued fraction did not converge");
}

// I_x(a, b) given x, y = 1 - x and their logarithms, all computed by the
// caller without cancellation.
double ibeta(double a, double b, double x, double y, double log_x,
             double log_y) {
  if (x <= 0.0)
    return 0.0;
  if (y <= 0.0)
    return 1.0;
  const double log_front = a * log_x + b * log_y + std::lgamma(a + b) -
                           std::lgamma(a) - std::lgamma(b);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * beta_fraction(a, b, x) / a;
  return 1.0 - front * beta_fraction(b, a, y) / b;
}

// P(T > t) for t >= 0.
double upper_tail(double t, double df) {
  const double r = t * t / df;
  const double x = 1.0 / (1.0 + r);
  const double y = r / (1.0 + r);
  return 0.5 * ibeta(df / 2.0, 0.5, x, y, -std::log1p(r),
                     std::log(r) - std::log1p(r));
}

double t_pdf(double t, double df) {
  return std::exp(std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
                  0.5 * std::log(df * std::numbers::pi) -
                  (df + 1.0) / 2.0 * std::log1p(t * t / df));
}

void check_df(double df) {
  if (!(df > 0.0) || !std::isfinite(df))
    fail(ErrorCode::Input, "degrees of freedom must be positive and finite");
}

} // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0))
    fail(ErrorCode::Input, "incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0))
    fail(ErrorCode::Input, "incomplete beta needs x in [0, 1]");
  return ibeta(a, b, x, 1.0 - x, std::log(x), std::log1p(-x));
}

double t_cdf(double t, double df) {
  check_df(df);
  if (std::isnan(t))
    fail(ErrorCode::Input, "t must not be NaN");
  if (std::isinf(t))
    return t > 0 ? 1.0 : 0.0;
  const double tail = upper_tail(std::abs(t), df);
  return t >= 0.0 ? 1.0 - tail : tail;
}

double t_quantile(double p, double df) {
  check_df(df);
  if (!(p > 0.0 && p < 1.0))
    fail(ErrorCode::Input, "probability must lie in (0, 1)");
  if (p == 0.5)
    return 0.0;
  const double q = p < 0.5 ? p : 1.0 - p;

  double lo = 0.0;
  double hi = 1.0;
  while (upper_tail(hi, df) > q) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi))
      fail(ErrorCode::Internal, "t quantile bracket overflowed");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (upper_tail(mid, df) > q ? lo : hi) = mid;
  }
  double t = 0.5 * (lo + hi);
  for (int i = 0; i < 3; ++i) {
    const double pdf = t_pdf(t, df);
    if (!(pdf > 0.0))
      break;
    const double next = t + (upper_tail(t, df) - q) / pdf;
    if (!(next >= lo && next <= hi))
      break;
    t = next;
  }
  return p < 0.5 ? -t : t;
}

} // namespace hrn
