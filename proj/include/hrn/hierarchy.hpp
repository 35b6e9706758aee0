#pragma once

#include "hrn/kernel.hpp"
#include "hrn/network.hpp"
#include "hrn/types.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace hrn {

inline constexpr int kDefaultMaxScales = 25;

struct FitOptions {
  std::optional<double> T;  // empty: diameter_T(X)
  double M = kDefaultScaleDivisor;
  double phi = kDefaultRankPrecision;
  int k_extra = kDefaultSketchOversampling;
  std::uint64_t seed = 0;
  int max_scales = kDefaultMaxScales;
  GcvSearch search;
};

/// One pass of the scale loop. A scale whose network could not be fit keeps
/// cost = +inf and empty coefficients.
struct ScaleRecord {
  int s = 0;
  double epsilon = 0.0;
  Index rank = 0;
  double comp = 0.0;
  double cost = std::numeric_limits<double>::infinity();
  std::vector<double> lambda;
  std::vector<int> q;
  std::uint64_t seed = 0;
  IndexList selected;
  Matrix points;  // X_s
  Vector values;  // Y_s
  Vector theta;
  double trace_U = 0.0;
  double trace_UUt = 0.0;

  bool fitted() const { return theta.size() > 0; }
};

/// Convergence-scale payload: everything mean prediction needs plus the
/// per-scale history.
struct SparseModel {
  int t = 0;
  double epsilon_t = 0.0;
  Matrix X_t;
  Vector Y_t;
  Vector C_t;
  IndexList selected;  // rows of the training data behind X_t
  std::vector<double> Lambda_t;
  std::vector<int> Q_t;
  double cost = 0.0;
  double trace_U = 0.0;
  double trace_UUt = 0.0;
  Index n_train = 0;
  double T = 0.0;
  std::vector<ScaleRecord> history;

  Index dim() const { return X_t.cols(); }
  Index size() const { return X_t.rows(); }

  /// The network fitted at history scale `s` as a standalone model.
  /// Throws Input for an unfit or unknown scale.
  SparseModel at_scale(int s) const;
};

/// 1 - l_s / n.
double compression_ratio(Index rank, Index n);

/// Sweeps s = 0, 1, ... until the Gram matrix is numerically full rank or
/// max_scales is reached, keeping the scale with the smallest GCV cost.
/// The incumbent changes only on a strict improvement, so the earlier
/// (sparser) scale wins ties.
SparseModel fit(const Dataset &D, const FitOptions &options = {});

} // namespace hrn
