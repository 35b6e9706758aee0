#include "hrn/penalty.hpp"

#include "hrn/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hrn {

void PenaltySpec::validate() const {
  if (Q.empty() || Q.size() != Lambda.size())
    fail(ErrorCode::Input, "penalty needs one order and one weight per dimension");
  for (int q : Q)
    if (q != 1 && q != 2)
      fail(ErrorCode::Input, "penalty order must be 1 or 2, got " +
                                 std::to_string(q));
  for (double lambda : Lambda)
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      fail(ErrorCode::Input, "penalty weights must be positive and finite");
}

Matrix difference_matrix(int q, Index m) {
  if (q < 1)
    fail(ErrorCode::Input, "difference order must be >= 1");
  if (m <= q)
    return Matrix(0, std::max<Index>(m, 0));
  Matrix D = Matrix::Identity(m, m);
  for (int k = 0; k < q; ++k) {
    const Index r = D.rows() - 1;
    D = (D.bottomRows(r) - D.topRows(r)).eval();
  }
  return D;
}

IndexList permutation_order(const Matrix &centers, Index dim) {
  if (dim < 0 || dim >= centers.cols())
    fail(ErrorCode::Input, "permutation dimension out of range");
  IndexList order(static_cast<std::size_t>(centers.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return centers(a, dim) < centers(b, dim);
  });
  return order;
}

Matrix permutation_operator(const Matrix &centers, Index dim) {
  const IndexList order = permutation_order(centers, dim);
  const Index l = centers.rows();
  Matrix Pe = Matrix::Zero(l, l);
  for (Index r = 0; r < l; ++r)
    Pe(r, order[static_cast<std::size_t>(r)]) = 1.0;
  return Pe;
}

Matrix difference_penalty(const Matrix &centers, Index dim, int q) {
  const Index l = centers.rows();
  const IndexList order = permutation_order(centers, dim);
  const Matrix D = difference_matrix(q, l);
  Matrix Psi = Matrix::Zero(l, l);
  if (D.rows() == 0)
    return Psi;
  // Psi = Pe^T (D^T D) Pe, i.e. Psi[order[a]][order[b]] = (D^T D)[a][b].
  const Matrix DtD = D.transpose() * D;
  for (Index b = 0; b < l; ++b)
    for (Index a = 0; a < l; ++a)
      Psi(order[static_cast<std::size_t>(a)],
          order[static_cast<std::size_t>(b)]) = DtD(a, b);
  return Psi;
}

PenaltyMatrix penalty_operator(const PenaltySpec &spec, const Matrix &centers) {
  spec.validate();
  if (spec.dim() != centers.cols())
    fail(ErrorCode::Input, "penalty spec dimension does not match centers");
  if (centers.rows() < 1)
    fail(ErrorCode::Input, "penalty needs at least one center");
  const Index l = centers.rows();
  PenaltyMatrix out;
  out.P = Matrix::Zero(l, l);
  for (Index i = 0; i < spec.dim(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    out.per_dim.push_back(difference_penalty(centers, i, spec.Q[k]));
    out.P += spec.Lambda[k] * out.per_dim.back();
  }
  return out;
}

} // namespace hrn
