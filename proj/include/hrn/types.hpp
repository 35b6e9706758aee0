#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace hrn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using IndexList = std::vector<Index>;

/// Observations Y at coordinates X (one row per point).
struct Dataset {
  Matrix X;
  Vector Y;

  Index size() const { return X.rows(); }
  Index dim() const { return X.cols(); }

  /// Throws ErrorCode::Input unless n >= 1, d >= 1, rows(X) == size(Y) and
  /// every entry is finite.
  void validate() const;
};

/// Rows of `X` listed in `rows`, in that order.
Matrix gather_rows(const Matrix &X, const IndexList &rows);
Vector gather(const Vector &v, const IndexList &rows);

} // namespace hrn
