#include "hrn/kernel.hpp"

#include "hrn/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace hrn {

double ScaleConfig::epsilon() const { return length_scale(T, M, s); }

double diameter_T(const Matrix &X) {
  if (X.rows() < 2)
    fail(ErrorCode::DegenerateGeometry,
         "diameter rule needs at least two points");
  if (!X.allFinite())
    fail(ErrorCode::Input, "coordinates must be finite");
  double max_sq = 0.0;
  for (Index i = 0; i < X.rows(); ++i)
    for (Index j = i + 1; j < X.rows(); ++j)
      max_sq = std::max(max_sq, (X.row(i) - X.row(j)).squaredNorm());
  if (max_sq == 0.0)
    fail(ErrorCode::DegenerateGeometry,
         "all points coincide; the diameter rule gives T = 0");
  return max_sq / 2.0;
}

double length_scale(double T, double M, int s) {
  if (!(T > 0.0) || !(M > 1.0) || s < 0)
    fail(ErrorCode::Input, "length scale needs T > 0, M > 1 and s >= 0");
  return T / std::pow(M, s);
}

namespace {

void check_kernel_args(const Matrix &A, const Matrix &B, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    fail(ErrorCode::Input, "kernel length scale must be positive and finite");
  if (A.cols() != B.cols())
    fail(ErrorCode::Input, "kernel arguments differ in dimension");
  if (!A.allFinite() || !B.allFinite())
    fail(ErrorCode::Input, "kernel coordinates must be finite");
}

} // namespace

Matrix cross_kernel(const Matrix &A, const Matrix &B, double epsilon) {
  check_kernel_args(A, B, epsilon);
  const Vector a2 = A.rowwise().squaredNorm();
  const Vector b2 = B.rowwise().squaredNorm();
  Matrix K = -2.0 * (A * B.transpose());
  K.colwise() += a2;
  K.rowwise() += b2.transpose();
  return K.unaryExpr(
      [epsilon](double sq) { return std::exp(-std::max(0.0, sq) / epsilon); });
}

GramMatrix gram(const Matrix &X, double epsilon_s) {
  check_kernel_args(X, X, epsilon_s);
  const Index n = X.rows();
  const Vector x2 = X.rowwise().squaredNorm();
  Matrix inner = X * X.transpose();
  Matrix G(n, n);
  for (Index j = 0; j < n; ++j) {
    G(j, j) = 1.0;
    for (Index i = j + 1; i < n; ++i) {
      const double sq = std::max(0.0, x2(i) + x2(j) - 2.0 * inner(i, j));
      G(i, j) = G(j, i) = std::exp(-sq / epsilon_s);
    }
  }
  return {std::move(G), epsilon_s};
}

Vector kernel_row(const Eigen::Ref<const Vector> &x, const Matrix &X,
                  double epsilon) {
  const Matrix point = x.transpose();
  return cross_kernel(point, X, epsilon).transpose();
}

Index numerical_rank(const Matrix &G, double phi) {
  if (!(phi > 0.0 && phi < 1.0))
    fail(ErrorCode::Input, "rank precision must lie in (0, 1)");
  if (G.rows() != G.cols())
    fail(ErrorCode::Input, "numerical rank expects a square symmetric matrix");
  if (G.size() == 0)
    return 0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(G, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    fail(ErrorCode::Internal, "eigenvalue iteration did not converge");
  const Vector sigma = eig.eigenvalues().cwiseAbs();
  const double top = sigma.maxCoeff();
  if (top == 0.0)
    return 0;
  return (sigma.array() / top >= phi).count();
}

} // namespace hrn
