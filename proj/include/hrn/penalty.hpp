#pragma once

#include "hrn/types.hpp"

#include <vector>

namespace hrn {

/// Per-dimension difference order q_i in {1, 2} and weight lambda_i > 0.
struct PenaltySpec {
  std::vector<int> Q;
  std::vector<double> Lambda;

  Index dim() const { return static_cast<Index>(Q.size()); }
  void validate() const;
};

/// P = sum_i lambda_i * Psi_i with Psi_i = Pe_i^T D^T D Pe_i.
struct PenaltyMatrix {
  Matrix P;
  std::vector<Matrix> per_dim;  // Psi_i, unweighted
};

/// (m - q) x m matrix of q-th order forward differences. Rows hold the
/// binomial stencil with alternating signs, e.g. (-1, 1) and (1, -2, 1).
/// Returns a 0 x m matrix when m <= q.
Matrix difference_matrix(int q, Index m);

/// Basis indices ordered by nondecreasing coordinate in `dim`; ties keep
/// basis (pivot) order. Entry r is the coefficient moved to position r.
IndexList permutation_order(const Matrix &centers, Index dim);

/// Dense permutation matrix Pe with (Pe * theta)[r] = theta[order[r]].
Matrix permutation_operator(const Matrix &centers, Index dim);

/// Psi = Pe^T D^q^T D^q Pe for the given centers and dimension.
Matrix difference_penalty(const Matrix &centers, Index dim, int q);

PenaltyMatrix penalty_operator(const PenaltySpec &spec, const Matrix &centers);

} // namespace hrn
