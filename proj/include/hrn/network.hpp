#pragma once

#include "hrn/penalty.hpp"
#include "hrn/types.hpp"

#include <Eigen/Cholesky>

#include <optional>
#include <vector>

namespace hrn {

/// Factorization of S = B^T B + n P shared by every per-scale quantity.
///
/// Falls back once to a diagonal jitter of 1e-12 * tr(B^T B) / l when the
/// plain Cholesky fails; throws IllConditioned if that fails too.
class PenalizedSystem {
public:
  PenalizedSystem(const Matrix &B, const Matrix &P, Index n);
  PenalizedSystem(const Matrix &B, const Matrix &BtB, const Matrix &P,
                  Index n);

  Index basis_size() const { return S_.rows(); }
  bool jittered() const { return jittered_; }

  Vector solve(const Vector &rhs) const { return llt_.solve(rhs); }
  Matrix solve(const Matrix &rhs) const { return llt_.solve(rhs); }

  /// theta = S^{-1} B^T Y.
  Vector weights(const Vector &Y) const;
  /// tr(U) = tr(S^{-1} B^T B).
  double trace_influence() const;
  /// tr(U U^T) = tr((S^{-1} B^T B)^2).
  double trace_influence_squared() const;
  /// U = B S^{-1} B^T (n x n, symmetrized).
  Matrix influence() const;

  const Matrix &basis() const { return *B_; }
  const Matrix &gram() const { return BtB_; }
  const Eigen::LLT<Matrix> &factor() const { return llt_; }

private:
  void factorize(const Matrix &P, Index n);

  const Matrix *B_;  // caller keeps B alive
  Matrix BtB_;
  Matrix S_;
  Eigen::LLT<Matrix> llt_;
  bool jittered_ = false;
};

/// (B^T B + n P)^{-1} B^T Y.
Vector solve_weights(const Matrix &B, const Vector &Y, const Matrix &P,
                     Index n);

/// B (B^T B + n P)^{-1} B^T.
Matrix influence_matrix(const Matrix &B, const Matrix &P, Index n);

/// (1/n)|(I - U)Y|^2 / [(1/n) tr(I - U)]^2. Throws DegenerateGcv when
/// tr(I - U) vanishes.
double gcv(const Matrix &B, const Vector &Y, const Matrix &P, Index n);

/// Search domain and resolution of the GCV minimization.
struct GcvSearch {
  double log10_lo = -8.0;
  double log10_hi = 2.0;
  int grid_points = 11;
  int refine_passes = 3;
  double tolerance = 1e-3;  // in log10(lambda)
};

struct FittedScale {
  Vector theta;
  std::vector<double> lambda;
  std::vector<int> q;
  double cost = 0.0;
  double trace_U = 0.0;
  Vector fitted;
  double comp = 0.0;
};

/// Every Q in {1,2}^d, first dimension varying slowest.
std::vector<std::vector<int>> penalty_orders(Index d);

/// Minimizes GCV over Q in {1,2}^d and Lambda in (0, inf)^d.
///
/// Every Q combination is searched on a log10 grid (tensorized for d <= 2,
/// coordinate sweeps above), then refined per coordinate by golden
/// section. Throws ScaleUnfit when no candidate yields a finite GCV.
FittedScale optimize_gcv(const Matrix &B, const Vector &Y,
                         const Matrix &centers, Index n,
                         const GcvSearch &search = {});

/// Representer vectors at one evaluation point.
struct RepresenterOracle {
  Vector M_lambda;  // B S^{-1} R_x|X_s
  Vector M_zero;    // B (B^T B)^{-1} R_x|X_s
  Vector R_x;       // K(x, x_j) over the full data
  double a = 0.0;   // M_zero^T U R_x
};

/// `X` holds the full training coordinates; `selected` the basis centers.
RepresenterOracle representer(const Eigen::Ref<const Vector> &x,
                              const Matrix &B, const Matrix &P,
                              const Matrix &X, double epsilon,
                              const IndexList &selected, Index n);

} // namespace hrn
