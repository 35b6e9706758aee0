#include "hrn/network.hpp"

#include "hrn/error.hpp"
#include "hrn/kernel.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hrn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_system(const Matrix &B, const Matrix &P, Index n) {
  if (B.cols() < 1)
    fail(ErrorCode::Input, "basis needs at least one column");
  if (P.rows() != B.cols() || P.cols() != B.cols())
    fail(ErrorCode::Input, "penalty is " + std::to_string(P.rows()) + "x" +
                               std::to_string(P.cols()) + " but basis has " +
                               std::to_string(B.cols()) + " columns");
  if (n < 1)
    fail(ErrorCode::Input, "sample count must be positive");
}

// Cholesky of BtB + n P with one jittered retry.
bool factorize_penalized(const Matrix &BtB, const Matrix &P, Index n,
                         Eigen::LLT<Matrix> &llt, Matrix &S) {
  S = BtB;
  S.noalias() += static_cast<double>(n) * P;
  llt.compute(S);
  if (llt.info() == Eigen::Success && llt.matrixLLT().allFinite())
    return false;
  const double l = static_cast<double>(S.rows());
  const double jitter = 1e-12 * BtB.trace() / l;
  S.diagonal().array() += jitter;
  llt.compute(S);
  if (llt.info() == Eigen::Success && llt.matrixLLT().allFinite())
    return true;
  fail(ErrorCode::IllConditioned,
       "penalized normal equations are singular to working precision");
}

double gcv_value(double rss, double trace_U, Index n) {
  const double nn = static_cast<double>(n);
  const double dof = nn - trace_U;
  if (!(std::abs(dof) > 1e-10 * nn))
    fail(ErrorCode::DegenerateGcv,
         "tr(I - U) vanishes; GCV is undefined (unpenalized interpolation?)");
  const double denom = dof / nn;
  return (rss / nn) / (denom * denom);
}

} // namespace

PenalizedSystem::PenalizedSystem(const Matrix &B, const Matrix &P, Index n)
    : PenalizedSystem(B, B.transpose() * B, P, n) {}

PenalizedSystem::PenalizedSystem(const Matrix &B, const Matrix &BtB,
                                 const Matrix &P, Index n)
    : B_(&B), BtB_(BtB) {
  check_system(B, P, n);
  factorize(P, n);
}

void PenalizedSystem::factorize(const Matrix &P, Index n) {
  jittered_ = factorize_penalized(BtB_, P, n, llt_, S_);
}

Vector PenalizedSystem::weights(const Vector &Y) const {
  if (Y.size() != B_->rows())
    fail(ErrorCode::Input, "observation count does not match basis rows");
  return llt_.solve(B_->transpose() * Y);
}

double PenalizedSystem::trace_influence() const {
  return llt_.solve(BtB_).trace();
}

double PenalizedSystem::trace_influence_squared() const {
  const Matrix H = llt_.solve(BtB_);
  return H.cwiseProduct(H.transpose()).sum();
}

Matrix PenalizedSystem::influence() const {
  // U = V^T V with V = L^{-1} B^T.
  Matrix V = B_->transpose();
  llt_.matrixL().solveInPlace(V);
  return V.transpose() * V;
}

Vector solve_weights(const Matrix &B, const Vector &Y, const Matrix &P,
                     Index n) {
  return PenalizedSystem(B, P, n).weights(Y);
}

Matrix influence_matrix(const Matrix &B, const Matrix &P, Index n) {
  return PenalizedSystem(B, P, n).influence();
}

double gcv(const Matrix &B, const Vector &Y, const Matrix &P, Index n) {
  const PenalizedSystem sys(B, P, n);
  const Vector theta = sys.weights(Y);
  const double rss = (Y - B * theta).squaredNorm();
  return gcv_value(rss, sys.trace_influence(), n);
}

namespace {

/// GCV over the weights of a fixed set of unweighted penalties.
///
/// tr(U) is taken as |L^{-1} R^T|_F^2 with B = Q R, and since both factors
/// are lower triangular only the lower triangle of the solve is formed.
class GcvObjective {
public:
  GcvObjective(const Matrix &B, const Vector &Y, Index n, const Matrix &BtB,
               const Vector &BtY, const Matrix &Rt,
               const std::vector<Matrix> &psi)
      : B_(B), Y_(Y), n_(n), BtB_(BtB), BtY_(BtY), Rt_(Rt), psi_(psi) {}

  struct Detail {
    double cost = kInf;
    Vector theta;
    Vector fitted;
    double trace_U = 0.0;
  };

  Detail evaluate(const std::vector<double> &log10_lambda) const {
    Matrix P = Matrix::Zero(BtB_.rows(), BtB_.cols());
    for (std::size_t i = 0; i < psi_.size(); ++i)
      P += std::pow(10.0, log10_lambda[i]) * psi_[i];
    Eigen::LLT<Matrix> llt;
    Matrix S;
    factorize_penalized(BtB_, P, n_, llt, S);

    Detail out;
    out.theta = llt.solve(BtY_);
    out.fitted = B_ * out.theta;
    const double rss = (Y_ - out.fitted).squaredNorm();
    out.trace_U = lower_solve_trace(llt.matrixLLT());
    out.cost = gcv_value(rss, out.trace_U, n_);
    return out;
  }

  double operator()(const std::vector<double> &log10_lambda) const {
    try {
      const double cost = evaluate(log10_lambda).cost;
      return std::isfinite(cost) ? cost : kInf;
    } catch (const Error &e) {
      if (e.code() == ErrorCode::IllConditioned ||
          e.code() == ErrorCode::DegenerateGcv)
        return kInf;
      throw;
    }
  }

private:
  // |L^{-1} R^T|_F^2 for lower-triangular L (stored in `llt`) and R^T.
  double lower_solve_trace(const Matrix &llt) const {
    constexpr Index kBlock = 64;
    const Index l = Rt_.rows();
    double total = 0.0;
    for (Index j0 = 0; j0 < l; j0 += kBlock) {
      const Index w = std::min(kBlock, l - j0);
      const Index h = l - j0;
      Matrix X = Rt_.block(j0, j0, h, w);
      llt.block(j0, j0, h, h).triangularView<Eigen::Lower>().solveInPlace(X);
      total += X.squaredNorm();
    }
    return total;
  }

  const Matrix &B_;
  const Vector &Y_;
  Index n_;
  const Matrix &BtB_;
  const Vector &BtY_;
  const Matrix &Rt_;
  const std::vector<Matrix> &psi_;
};

struct SearchPoint {
  double cost = kInf;
  std::vector<double> x;  // log10 lambda
};

double grid_value(const GcvSearch &search, int k) {
  if (search.grid_points < 2)
    return search.log10_lo;
  return search.log10_lo + (search.log10_hi - search.log10_lo) * k /
                               (search.grid_points - 1);
}

SearchPoint coarse_search(const GcvObjective &f, Index d,
                          const GcvSearch &search) {
  const int g = search.grid_points;
  SearchPoint best;
  if (d <= 2) {
    std::vector<int> k(static_cast<std::size_t>(d), 0);
    while (true) {
      std::vector<double> x(k.size());
      for (std::size_t i = 0; i < k.size(); ++i)
        x[i] = grid_value(search, k[i]);
      const double c = f(x);
      if (c < best.cost)
        best = {c, x};
      // Odometer with the last dimension varying fastest.
      Index i = d - 1;
      while (i >= 0 && ++k[static_cast<std::size_t>(i)] == g)
        k[static_cast<std::size_t>(i--)] = 0;
      if (i < 0)
        break;
    }
    return best;
  }

  std::vector<int> k(static_cast<std::size_t>(d), g / 2);
  auto at = [&](const std::vector<int> &idx) {
    std::vector<double> x(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
      x[i] = grid_value(search, idx[i]);
    return x;
  };
  best = {f(at(k)), at(k)};
  for (int sweep = 0; sweep < search.grid_points; ++sweep) {
    bool changed = false;
    for (std::size_t i = 0; i < k.size(); ++i) {
      for (int v = 0; v < g; ++v) {
        if (v == k[i])
          continue;
        auto trial = k;
        trial[i] = v;
        const double c = f(at(trial));
        if (c < best.cost) {
          best = {c, at(trial)};
          k = trial;
          changed = true;
        }
      }
    }
    if (!changed)
      break;
  }
  return best;
}

void refine(const GcvObjective &f, SearchPoint &best, const GcvSearch &search) {
  if (!std::isfinite(best.cost))
    return;
  const double step = search.grid_points > 1
                          ? (search.log10_hi - search.log10_lo) /
                                (search.grid_points - 1)
                          : 1.0;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int pass = 0; pass < search.refine_passes; ++pass) {
    bool improved = false;
    for (std::size_t i = 0; i < best.x.size(); ++i) {
      auto probe = [&](double v) {
        auto x = best.x;
        x[i] = v;
        return SearchPoint{f(x), x};
      };
      double a = std::max(search.log10_lo, best.x[i] - step);
      double b = std::min(search.log10_hi, best.x[i] + step);
      SearchPoint c = probe(b - ratio * (b - a));
      SearchPoint e = probe(a + ratio * (b - a));
      SearchPoint local = c.cost <= e.cost ? c : e;
      while (b - a > search.tolerance) {
        if (c.cost <= e.cost) {
          b = e.x[i];
          e = c;
          c = probe(b - ratio * (b - a));
        } else {
          a = c.x[i];
          c = e;
          e = probe(a + ratio * (b - a));
        }
        if (c.cost < local.cost)
          local = c;
        if (e.cost < local.cost)
          local = e;
      }
      if (local.cost < best.cost) {
        best = local;
        improved = true;
      }
    }
    if (!improved)
      break;
  }
}

} // namespace

std::vector<std::vector<int>> penalty_orders(Index d) {
  if (d < 1 || d > 30)
    fail(ErrorCode::Input, "penalty orders need 1 <= d <= 30");
  std::vector<std::vector<int>> out;
  for (Index mask = 0; mask < (Index{1} << d); ++mask) {
    std::vector<int> Q(static_cast<std::size_t>(d));
    for (Index i = 0; i < d; ++i)
      Q[static_cast<std::size_t>(i)] = ((mask >> (d - 1 - i)) & 1) ? 2 : 1;
    out.push_back(std::move(Q));
  }
  return out;
}

FittedScale optimize_gcv(const Matrix &B, const Vector &Y,
                         const Matrix &centers, Index n,
                         const GcvSearch &search) {
  const Index l = B.cols();
  const Index d = centers.cols();
  if (l < 1)
    fail(ErrorCode::Input, "GCV optimization needs at least one basis column");
  if (centers.rows() != l || d < 1)
    fail(ErrorCode::Input, "centers must have one row per basis column");
  if (Y.size() != B.rows() || n != B.rows())
    fail(ErrorCode::Input, "observation count does not match basis rows");

  const Matrix BtB = B.transpose() * B;
  const Vector BtY = B.transpose() * Y;
  Eigen::HouseholderQR<Matrix> qr(B);
  const Index r = std::min(B.rows(), l);
  Matrix Rt = Matrix::Zero(l, l);
  Rt.topRows(r) = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  Rt.transposeInPlace();

  std::vector<Matrix> cache1, cache2;
  for (Index i = 0; i < d; ++i) {
    cache1.push_back(difference_penalty(centers, i, 1));
    cache2.push_back(difference_penalty(centers, i, 2));
  }

  SearchPoint best;
  std::vector<int> bestQ;
  for (const auto &Q : penalty_orders(d)) {
    std::vector<Matrix> psi;
    for (Index i = 0; i < d; ++i)
      psi.push_back(Q[static_cast<std::size_t>(i)] == 2
                        ? cache2[static_cast<std::size_t>(i)]
                        : cache1[static_cast<std::size_t>(i)]);
    const GcvObjective f(B, Y, n, BtB, BtY, Rt, psi);
    SearchPoint candidate = coarse_search(f, d, search);
    refine(f, candidate, search);
    if (candidate.cost < best.cost) {
      best = candidate;
      bestQ = Q;
    }
  }
  if (!std::isfinite(best.cost))
    fail(ErrorCode::ScaleUnfit,
         "no penalty order and weight gave a finite GCV score");

  std::vector<Matrix> psi;
  for (Index i = 0; i < d; ++i)
    psi.push_back(bestQ[static_cast<std::size_t>(i)] == 2
                      ? cache2[static_cast<std::size_t>(i)]
                      : cache1[static_cast<std::size_t>(i)]);
  const GcvObjective f(B, Y, n, BtB, BtY, Rt, psi);
  auto detail = f.evaluate(best.x);

  FittedScale out;
  out.theta = std::move(detail.theta);
  out.fitted = std::move(detail.fitted);
  out.cost = detail.cost;
  out.trace_U = detail.trace_U;
  out.q = bestQ;
  for (double x : best.x)
    out.lambda.push_back(std::pow(10.0, x));
  out.comp = 1.0 - static_cast<double>(l) / static_cast<double>(n);
  return out;
}

RepresenterOracle representer(const Eigen::Ref<const Vector> &x,
                              const Matrix &B, const Matrix &P,
                              const Matrix &X, double epsilon,
                              const IndexList &selected, Index n) {
  if (x.size() != X.cols())
    fail(ErrorCode::Input, "evaluation point dimension mismatch");
  if (!x.allFinite())
    fail(ErrorCode::Input, "evaluation point must be finite");
  if (static_cast<Index>(selected.size()) != B.cols() || X.rows() != B.rows())
    fail(ErrorCode::Input, "representer inputs disagree in size");

  const PenalizedSystem sys(B, P, n);
  RepresenterOracle out;
  out.R_x = kernel_row(x, X, epsilon);
  const Vector R_s = gather(out.R_x, selected);
  out.M_lambda = B * sys.solve(R_s);

  // B (B^T B)^{-1} v = Q R^{-T} v for B = Q R.
  Eigen::HouseholderQR<Matrix> qr(B);
  const Index l = B.cols();
  Vector w = qr.matrixQR()
                 .topLeftCorner(l, l)
                 .triangularView<Eigen::Upper>()
                 .transpose()
                 .solve(R_s);
  Vector padded = Vector::Zero(B.rows());
  padded.head(l) = w;
  out.M_zero = qr.householderQ() * padded;

  const Vector U_R = B * sys.solve(Vector(B.transpose() * out.R_x));
  out.a = out.M_zero.dot(U_R);
  return out;
}

} // namespace hrn
