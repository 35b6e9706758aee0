#include "../oracles.hpp"

#include "hrn/error.hpp"
#include "hrn/sparsify.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace hrn;

TEST_CASE("sketch dimensions and determinism") {
  std::mt19937_64 gen(1);
  const GramMatrix G = gram(oracle::random_matrix(gen, 100, 1), 0.01);
  const SketchMatrix W = sketch(G, 20, 8, 42);
  CHECK(W.k == 28);
  CHECK(W.W.rows() == 28);
  CHECK(W.W.cols() == 100);

  const GramMatrix small = gram(oracle::random_matrix(gen, 5, 1), 0.01);
  const SketchMatrix Ws = sketch(small, 5, 8, 1);
  CHECK(Ws.W.rows() == 5);
  CHECK(Ws.W.cols() == 5);

  const SketchMatrix again = sketch(G, 20, 8, 42);
  CHECK((W.W.array() == again.W.array()).all());
  const SketchMatrix other = sketch(G, 20, 8, 43);
  CHECK_FALSE((W.W.array() == other.W.array()).all());
}

TEST_CASE("pivoted_qr") {
  SUBCASE("orthogonal columns already in norm order") {
    Matrix W = Matrix::Zero(3, 3);
    W(0, 0) = 3;
    W(1, 1) = 2;
    W(2, 2) = 1;
    const PivotedQr qr = pivoted_qr(W);
    CHECK(qr.pivot == IndexList{0, 1, 2});
    CHECK(qr.r_diag[0] == doctest::Approx(3));
    CHECK(qr.r_diag[2] == doctest::Approx(1));
  }
  SUBCASE("duplicate direction") {
    Matrix W(3, 2);
    W.col(0) << 1, 2, 3;
    W.col(1) = 2 * W.col(0);
    const PivotedQr qr = pivoted_qr(W);
    CHECK(qr.pivot[0] == 1);
    CHECK(qr.r_diag[1] < 1e-12);
  }
  SUBCASE("greedy oracle on random W") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      std::mt19937_64 gen(seed);
      const Matrix W = oracle::random_matrix(gen, 6, 8, -1, 1);
      const PivotedQr qr = pivoted_qr(W);
      const auto greedy = oracle::greedy_pivots(W, 6);
      for (std::size_t j = 0; j < 6; ++j)
        CHECK(qr.pivot[j] == greedy[j]);
      for (Index j = 1; j < qr.r_diag.size(); ++j)
        CHECK(qr.r_diag[j] <= qr.r_diag[j - 1] * (1 + 1e-12));
      std::set<Index> seen(qr.pivot.begin(), qr.pivot.end());
      CHECK(seen.size() == 8);
    }
  }
  SUBCASE("ties go to the lower index") {
    const Matrix W = Matrix::Identity(4, 4);
    CHECK(pivoted_qr_permutation(W) == IndexList{0, 1, 2, 3});
  }
  SUBCASE("zero matrix") {
    CHECK_THROWS_AS(pivoted_qr(Matrix::Zero(3, 4)), Error);
  }
}

TEST_CASE("select_basis") {
  std::mt19937_64 gen(3);
  const GramMatrix G = gram(oracle::random_matrix(gen, 12, 2), 0.3);
  IndexList identity(12);
  for (Index i = 0; i < 12; ++i)
    identity[static_cast<std::size_t>(i)] = i;
  const ScaleBasis full = select_basis(G, identity, 12);
  CHECK((full.B.array() == G.G.array()).all());

  const IndexList pivot = pivoted_qr_permutation(sketch(G, 1, 8, 0).W);
  const ScaleBasis one = select_basis(G, pivot, 1);
  CHECK(one.B.cols() == 1);
  CHECK((one.B.col(0).array() == G.G.col(pivot[0]).array()).all());

  IndexList dup = identity;
  dup[1] = dup[0];
  CHECK_THROWS_AS(select_basis(G, dup, 3), Error);
  CHECK_THROWS_AS(select_basis(G, identity, 13), Error);
}

TEST_CASE("clustered data selects across clusters") {
  Matrix X(12, 1);
  X << 0.0, 0.01, 0.02, 0.03, 5.0, 5.01, 5.02, 5.03, 10.0, 10.01, 10.02, 10.03;
  const GramMatrix G = gram(X, 0.5);
  const SketchMatrix W = sketch(G, numerical_rank(G, 1e-10), 8, 7);
  const PivotedQr qr = pivoted_qr(W.W);
  const auto greedy = oracle::greedy_pivots(W.W, 3);
  std::set<int> clusters;
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(qr.pivot[j] == greedy[j]);
    clusters.insert(static_cast<int>(qr.pivot[j] / 4));
  }
  CHECK(clusters.size() == 3);
}

TEST_CASE("rank chain across scales") {
  std::mt19937_64 gen(21);
  const Matrix X = oracle::random_matrix(gen, 70, 1);
  const double T = diameter_T(X);
  Index prev = 0;
  for (int s = 0; s < 16; ++s) {
    const GramMatrix G = gram(X, length_scale(T, 2, s));
    const Index l = numerical_rank(G, 1e-10);
    CHECK(l >= prev);
    const ScaleBasis b = select_basis(G, pivoted_qr_permutation(sketch(G, l, 8, s).W), l);
    std::set<Index> sel(b.selected.begin(), b.selected.end());
    CHECK(static_cast<Index>(sel.size()) == l);
    CHECK(*sel.rbegin() < 70);
    prev = l;
  }
}
