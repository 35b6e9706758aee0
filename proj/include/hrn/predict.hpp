#pragma once

#include "hrn/hierarchy.hpp"
#include "hrn/types.hpp"

#include <Eigen/Cholesky>

#include <utility>

namespace hrn {

/// Mean, standard errors and two-sided t bounds at query points.
struct PredictionSet {
  Matrix X_m;
  Vector mean;
  Vector std;
  Vector lower;
  Vector upper;
  double alpha = 0.05;
  double df_res = 0.0;
  double sigma2_hat = 0.0;
};

/// P_m = B_m C_t using only (epsilon_t, X_t, C_t).
Vector predict_mean(const SparseModel &model, const Matrix &X_m);

/// Residual variance machinery rebuilt from the full training data.
///
/// Holds the factorization of B^T B + n P at the convergence scale, where B
/// is the n x l_t kernel between the training inputs and X_t.
class IntervalEstimator {
public:
  IntervalEstimator(const SparseModel &model, const Dataset &D);

  double trace_U() const { return trace_U_; }
  double trace_UUt() const { return trace_UUt_; }
  /// n - 2 tr(U) + tr(U U^T).
  double df_res() const { return df_res_; }
  double residual_sum_squares() const { return rss_; }
  /// |Y - B C_t|^2 / df_res; throws DegenerateDof when df_res <= 0.
  double sigma2_hat() const;
  /// sigma_hat * sqrt(b(x) S^{-1} b(x)^T) per query row.
  Vector std(const Matrix &X_m) const;

private:
  const SparseModel &model_;
  Eigen::LLT<Matrix> llt_;
  Index n_ = 0;
  double trace_U_ = 0.0;
  double trace_UUt_ = 0.0;
  double df_res_ = 0.0;
  double rss_ = 0.0;
};

double sigma2_hat(const SparseModel &model, const Dataset &D);
Vector predict_std(const SparseModel &model, const Dataset &D,
                   const Matrix &X_m);

/// mean -/+ t(1 - alpha/2; df_res) * std.
std::pair<Vector, Vector> confidence_intervals(const Vector &mean,
                                               const Vector &std,
                                               double df_res, double alpha);

/// Mean plus intervals at confidence 1 - alpha.
PredictionSet predict_with_intervals(const SparseModel &model,
                                     const Dataset &D, const Matrix &X_m,
                                     double alpha);

} // namespace hrn
