#pragma once

#include "hrn/kernel.hpp"
#include "hrn/types.hpp"

#include <cstdint>

namespace hrn {

/// W = A * G with A a k x n standard normal matrix.
struct SketchMatrix {
  Matrix W;
  Index k = 0;
  std::uint64_t seed = 0;
};

/// Column-pivoted Householder QR result. Only the permutation and the
/// diagonal of R are kept.
struct PivotedQr {
  IndexList pivot;  // pivot[j] = original column placed at position j
  Vector r_diag;    // |R[j][j]|, nonincreasing
};

/// Gram columns chosen by the pivoted QR. `selected` defines X_s and the
/// coefficient ordering used by the penalty.
struct ScaleBasis {
  IndexList pivot;
  IndexList selected;
  Matrix B;
  Index rank = 0;
};

/// k = min(n, rank + k_extra). Deterministic in `seed`.
SketchMatrix sketch(const GramMatrix &G, Index rank, int k_extra,
                    std::uint64_t seed);

/// Householder QR with max-residual-norm column pivoting on W (k x n).
///
/// Equal residual norms resolve to the lower original column index.
/// Throws Input for an all-zero W.
PivotedQr pivoted_qr(const Matrix &W);
inline IndexList pivoted_qr_permutation(const Matrix &W) {
  return pivoted_qr(W).pivot;
}

ScaleBasis select_basis(const GramMatrix &G, const IndexList &pivot,
                        Index rank);

} // namespace hrn
