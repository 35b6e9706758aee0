#include "hrn/hierarchy.hpp"

#include "hrn/error.hpp"
#include "hrn/penalty.hpp"
#include "hrn/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hrn {

double compression_ratio(Index rank, Index n) {
  if (n < 1 || rank < 1 || rank > n)
    fail(ErrorCode::Input, "compression ratio needs 1 <= rank <= n, got rank " +
                               std::to_string(rank) + " for n " +
                               std::to_string(n));
  return 1.0 - static_cast<double>(rank) / static_cast<double>(n);
}

namespace {

bool recoverable(ErrorCode code) {
  return code == ErrorCode::IllConditioned ||
         code == ErrorCode::DegenerateGcv || code == ErrorCode::ScaleUnfit;
}

ScaleRecord fit_scale(const Dataset &D, double T, const FitOptions &options,
                      int s) {
  const Index n = D.size();
  ScaleRecord rec;
  rec.s = s;
  rec.epsilon = length_scale(T, options.M, s);
  rec.seed = options.seed + static_cast<std::uint64_t>(s);

  const GramMatrix G = gram(D.X, rec.epsilon);
  rec.rank = numerical_rank(G, options.phi);
  if (rec.rank < 1)
    fail(ErrorCode::Internal, "Gram matrix reported rank 0");
  rec.comp = compression_ratio(rec.rank, n);

  const SketchMatrix W = sketch(G, rec.rank, options.k_extra, rec.seed);
  const ScaleBasis basis =
      select_basis(G, pivoted_qr_permutation(W.W), rec.rank);
  rec.selected = basis.selected;
  rec.points = gather_rows(D.X, rec.selected);
  rec.values = gather(D.Y, rec.selected);

  try {
    FittedScale fs = optimize_gcv(basis.B, D.Y, rec.points, n, options.search);
    const PenaltyMatrix P =
        penalty_operator(PenaltySpec{fs.q, fs.lambda}, rec.points);
    rec.trace_UUt =
        PenalizedSystem(basis.B, P.P, n).trace_influence_squared();
    rec.cost = fs.cost;
    rec.lambda = std::move(fs.lambda);
    rec.q = std::move(fs.q);
    rec.theta = std::move(fs.theta);
    rec.trace_U = fs.trace_U;
  } catch (const Error &e) {
    if (!recoverable(e.code()))
      throw;
    rec = ScaleRecord{rec.s, rec.epsilon, rec.rank, rec.comp};
    rec.seed = options.seed + static_cast<std::uint64_t>(s);
    rec.selected = basis.selected;
    rec.points = gather_rows(D.X, rec.selected);
    rec.values = gather(D.Y, rec.selected);
  }
  return rec;
}

} // namespace

SparseModel SparseModel::at_scale(int s) const {
  const auto it = std::find_if(history.begin(), history.end(),
                               [s](const ScaleRecord &r) { return r.s == s; });
  if (it == history.end())
    fail(ErrorCode::Input, "scale " + std::to_string(s) + " is not in the history");
  if (!it->fitted())
    fail(ErrorCode::Input, "scale " + std::to_string(s) + " has no fitted network");

  SparseModel out;
  out.t = it->s;
  out.epsilon_t = it->epsilon;
  out.X_t = it->points;
  out.Y_t = it->values;
  out.C_t = it->theta;
  out.selected = it->selected;
  out.Lambda_t = it->lambda;
  out.Q_t = it->q;
  out.cost = it->cost;
  out.trace_U = it->trace_U;
  out.trace_UUt = it->trace_UUt;
  out.n_train = n_train;
  out.T = T;
  out.history = history;
  return out;
}

SparseModel fit(const Dataset &D, const FitOptions &options) {
  D.validate();
  if (D.size() < 2)
    fail(ErrorCode::Input, "fitting needs at least two points");
  if (options.max_scales < 1)
    fail(ErrorCode::Input, "max_scales must be at least 1");
  if (options.k_extra < 0)
    fail(ErrorCode::Input, "k_extra must be nonnegative");
  if (!(options.phi > 0.0 && options.phi < 1.0))
    fail(ErrorCode::Input, "phi must lie in (0, 1)");

  double T = 0.0;
  if (options.T) {
    T = *options.T;
    if (!(T > 0.0) || !std::isfinite(T))
      fail(ErrorCode::Input, "T must be positive and finite");
  } else {
    T = diameter_T(D.X);
  }
  (void)length_scale(T, options.M, 0);

  SparseModel model;
  model.n_train = D.size();
  model.T = T;
  int best = -1;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int s = 0; s < options.max_scales; ++s) {
    ScaleRecord rec = fit_scale(D, T, options, s);
    const bool full = rec.rank == D.size();
    if (rec.fitted() && rec.cost < best_cost) {
      best_cost = rec.cost;
      best = s;
    }
    model.history.push_back(std::move(rec));
    if (full)
      break;
  }
  if (best < 0)
    fail(ErrorCode::Fit, "no scale produced a finite GCV cost");
  return model.at_scale(best);
}

} // namespace hrn
