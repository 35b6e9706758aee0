#include "hrn/predict.hpp"

#include "hrn/error.hpp"
#include "hrn/kernel.hpp"
#include "hrn/network.hpp"
#include "hrn/penalty.hpp"
#include "hrn/student_t.hpp"

#include <cmath>
#include <string>

namespace hrn {

namespace {

void check_queries(const SparseModel &model, const Matrix &X_m) {
  if (model.size() < 1 || model.C_t.size() != model.size())
    fail(ErrorCode::Input, "model has no centers or mismatched coefficients");
  if (X_m.cols() != model.dim())
    fail(ErrorCode::Input, "query points have " + std::to_string(X_m.cols()) +
                               " columns but the model expects " +
                               std::to_string(model.dim()));
  if (!X_m.allFinite())
    fail(ErrorCode::Input, "query points must be finite");
}

} // namespace

Vector predict_mean(const SparseModel &model, const Matrix &X_m) {
  check_queries(model, X_m);
  return cross_kernel(X_m, model.X_t, model.epsilon_t) * model.C_t;
}

IntervalEstimator::IntervalEstimator(const SparseModel &model,
                                     const Dataset &D)
    : model_(model), n_(D.size()) {
  D.validate();
  if (D.dim() != model.dim())
    fail(ErrorCode::Input, "training data dimension does not match the model");
  if (model.size() < 1 || model.C_t.size() != model.size())
    fail(ErrorCode::Input, "model has no centers or mismatched coefficients");

  const Matrix B = cross_kernel(D.X, model.X_t, model.epsilon_t);
  const Matrix P =
      penalty_operator(PenaltySpec{model.Q_t, model.Lambda_t}, model.X_t).P;
  const PenalizedSystem sys(B, P, n_);
  llt_ = sys.factor();
  trace_U_ = sys.trace_influence();
  trace_UUt_ = sys.trace_influence_squared();
  df_res_ = static_cast<double>(n_) - 2.0 * trace_U_ + trace_UUt_;
  rss_ = (D.Y - B * model.C_t).squaredNorm();
}

double IntervalEstimator::sigma2_hat() const {
  if (!(df_res_ > 0.0))
    fail(ErrorCode::DegenerateDof,
         "residual degrees of freedom " + std::to_string(df_res_) +
             " are not positive; intervals are undefined");
  return rss_ / df_res_;
}

Vector IntervalEstimator::std(const Matrix &X_m) const {
  check_queries(model_, X_m);
  const double sigma = std::sqrt(sigma2_hat());
  Matrix V = cross_kernel(X_m, model_.X_t, model_.epsilon_t).transpose();
  llt_.matrixL().solveInPlace(V);
  Vector out(X_m.rows());
  for (Index i = 0; i < X_m.rows(); ++i)
    out[i] = sigma * std::sqrt(std::max(0.0, V.col(i).squaredNorm()));
  return out;
}

double sigma2_hat(const SparseModel &model, const Dataset &D) {
  return IntervalEstimator(model, D).sigma2_hat();
}

Vector predict_std(const SparseModel &model, const Dataset &D,
                   const Matrix &X_m) {
  return IntervalEstimator(model, D).std(X_m);
}

std::pair<Vector, Vector> confidence_intervals(const Vector &mean,
                                               const Vector &std,
                                               double df_res, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    fail(ErrorCode::Input, "alpha must lie in (0, 1)");
  if (mean.size() != std.size())
    fail(ErrorCode::Input, "mean and std lengths differ");
  const double t = t_quantile(1.0 - alpha / 2.0, df_res);
  return {mean - t * std, mean + t * std};
}

PredictionSet predict_with_intervals(const SparseModel &model,
                                     const Dataset &D, const Matrix &X_m,
                                     double alpha) {
  PredictionSet out;
  out.X_m = X_m;
  out.alpha = alpha;
  out.mean = predict_mean(model, X_m);
  const IntervalEstimator est(model, D);
  out.df_res = est.df_res();
  out.sigma2_hat = est.sigma2_hat();
  out.std = est.std(X_m);
  std::tie(out.lower, out.upper) =
      confidence_intervals(out.mean, out.std, out.df_res, alpha);
  return out;
}

} // namespace hrn
