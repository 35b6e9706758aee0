#include "hrn/sparsify.hpp"

#include "hrn/error.hpp"
#include "hrn/rng.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace hrn {

SketchMatrix sketch(const GramMatrix &G, Index rank, int k_extra,
                    std::uint64_t seed) {
  if (rank < 1)
    fail(ErrorCode::Input, "sketch needs rank >= 1");
  if (k_extra < 0)
    fail(ErrorCode::Input, "sketch oversampling must be nonnegative");
  const Index n = G.size();
  const Index k = std::min<Index>(n, rank + k_extra);
  Rng rng(seed);
  // Filled row by row so the stream order does not depend on storage order.
  Matrix A(k, n);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < n; ++j)
      A(i, j) = rng.normal();
  return {A * G.G, k, seed};
}

PivotedQr pivoted_qr(const Matrix &W) {
  const Index rows = W.rows();
  const Index cols = W.cols();
  if (cols == 0 || W.isZero(0.0))
    fail(ErrorCode::Input, "pivoted QR of an all-zero sketch");

  Matrix R = W;
  IndexList pivot(static_cast<std::size_t>(cols));
  std::iota(pivot.begin(), pivot.end(), Index{0});
  const Index steps = std::min(rows, cols);
  Vector r_diag = Vector::Zero(steps);
  Vector norms(cols);

  for (Index j = 0; j < steps; ++j) {
    // Residual norms are recomputed rather than downdated so that ties and
    // pivot choices are reproducible bit for bit.
    const Index tail = rows - j;
    for (Index c = j; c < cols; ++c)
      norms(c) = R.col(c).tail(tail).squaredNorm();

    Index best = j;
    for (Index c = j + 1; c < cols; ++c) {
      if (norms(c) > norms(best) ||
          (norms(c) == norms(best) && pivot[c] < pivot[best]))
        best = c;
    }
    if (best != j) {
      R.col(j).swap(R.col(best));
      std::swap(pivot[j], pivot[best]);
    }

    auto x = R.col(j).tail(tail);
    const double alpha = x.norm();
    r_diag(j) = alpha;
    if (alpha == 0.0)
      continue;
    // Householder reflector v with (I - 2 v v^T) x = -sign(x0) |x| e0.
    Vector v = x;
    v(0) += (x(0) >= 0.0 ? alpha : -alpha);
    v.normalize();
    auto block = R.bottomRightCorner(tail, cols - j);
    const Eigen::RowVectorXd proj = v.transpose() * block;
    block.noalias() -= 2.0 * v * proj;
  }
  return {std::move(pivot), std::move(r_diag)};
}

ScaleBasis select_basis(const GramMatrix &G, const IndexList &pivot,
                        Index rank) {
  const Index n = G.size();
  if (rank < 0 || rank > n)
    fail(ErrorCode::Input, "basis rank " + std::to_string(rank) +
                               " outside [0, " + std::to_string(n) + "]");
  if (static_cast<Index>(pivot.size()) < rank)
    fail(ErrorCode::Internal, "pivot shorter than the requested rank");

  ScaleBasis basis;
  basis.pivot = pivot;
  basis.selected.assign(pivot.begin(), pivot.begin() + rank);
  basis.rank = rank;

  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (Index idx : basis.selected) {
    if (idx < 0 || idx >= n)
      fail(ErrorCode::Internal, "pivot index out of range");
    if (seen[static_cast<std::size_t>(idx)])
      fail(ErrorCode::Internal,
           "pivot repeats index " + std::to_string(idx));
    seen[static_cast<std::size_t>(idx)] = true;
  }

  basis.B.resize(n, rank);
  for (Index j = 0; j < rank; ++j)
    basis.B.col(j) = G.G.col(basis.selected[static_cast<std::size_t>(j)]);
  return basis;
}

} // namespace hrn
