#pragma once

#include "hrn/types.hpp"

#include <cstdint>

namespace hrn {

/// Relative singular-value threshold used for the numerical rank.
inline constexpr double kDefaultRankPrecision = 1e-10;
inline constexpr double kDefaultScaleDivisor = 2.0;
inline constexpr int kDefaultSketchOversampling = 8;

struct ScaleConfig {
  double T = 0.0;
  double M = kDefaultScaleDivisor;
  int s = 0;
  double phi = kDefaultRankPrecision;
  int k_extra = kDefaultSketchOversampling;

  double epsilon() const;
};

/// Squared-exponential Gram matrix at one length scale.
struct GramMatrix {
  Matrix G;
  double epsilon_s = 0.0;

  Index size() const { return G.rows(); }
};

/// Squared-distance scale from the most distant pair: diam^2 / 2.
///
/// Throws DegenerateGeometry when fewer than two distinct rows exist.
double diameter_T(const Matrix &X);

/// T / M^s.
double length_scale(double T, double M, int s);

/// Symmetric n x n kernel with unit diagonal.
GramMatrix gram(const Matrix &X, double epsilon_s);

/// Rectangular kernel block K[i][j] = exp(-|a_i - b_j|^2 / epsilon).
Matrix cross_kernel(const Matrix &A, const Matrix &B, double epsilon);

/// Kernel evaluations of one point `x` against every row of `X`.
Vector kernel_row(const Eigen::Ref<const Vector> &x, const Matrix &X,
                  double epsilon);

/// Number of singular values sigma_j with sigma_j / sigma_max >= phi.
///
/// G must be symmetric; its singular values are the absolute eigenvalues.
/// A zero matrix has rank 0.
Index numerical_rank(const Matrix &G, double phi);
inline Index numerical_rank(const GramMatrix &G, double phi) {
  return numerical_rank(G.G, phi);
}

} // namespace hrn
