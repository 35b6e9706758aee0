#include "../oracles.hpp"

#include "hrn/error.hpp"
#include "hrn/kernel.hpp"
#include "hrn/network.hpp"
#include "hrn/rng.hpp"

#include <doctest.h>

#include <random>

using namespace hrn;

namespace {

struct Problem {
  Matrix X;
  Vector Y;
  Matrix B;
  Matrix centers;
  IndexList selected;
  double eps;
};

Problem make_problem(std::uint64_t seed, Index n, Index d, Index l, double eps) {
  std::mt19937_64 gen(seed);
  Problem p;
  p.X = oracle::random_matrix(gen, n, d);
  p.Y = oracle::random_matrix(gen, n, 1, -1, 1);
  p.eps = eps;
  for (Index j = 0; j < l; ++j)
    p.selected.push_back(j * (n / l));
  p.centers = gather_rows(p.X, p.selected);
  p.B = cross_kernel(p.X, p.centers, eps);
  return p;
}

} // namespace

TEST_CASE("solve_weights") {
  const Vector Y = (Vector(2) << 3.0, -5.0).finished();
  const Vector theta = solve_weights(Matrix::Identity(2, 2), Y, 0.5 * Matrix::Identity(2, 2), 2);
  CHECK(oracle::rel_err(theta, Y / 2) < 1e-15);

  std::mt19937_64 gen(4);
  const Matrix B = oracle::random_matrix(gen, 4, 4) + 2 * Matrix::Identity(4, 4);
  const Vector Yb = oracle::random_matrix(gen, 4, 1);
  CHECK(oracle::rel_err(solve_weights(B, Yb, Matrix::Zero(4, 4), 4), Vector(B.lu().solve(Yb))) < 1e-12);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Problem p = make_problem(seed, 10, 1 + seed % 2, 4, 0.2);
    const Matrix P = oracle::penalty(p.centers, std::vector<int>(p.X.cols(), 1),
                                     std::vector<double>(p.X.cols(), 0.01));
    const Vector got = solve_weights(p.B, p.Y, P, 10);
    CHECK(oracle::rel_err(got, oracle::penalized_ls(p.B, p.Y, P, 10)) < 1e-9);
  }
}

TEST_CASE("influence_matrix") {
  std::mt19937_64 gen(6);
  const Matrix A = oracle::random_matrix(gen, 8, 3);
  const Matrix Qo = A.householderQr().householderQ() * Matrix::Identity(8, 3);
  const Matrix U = influence_matrix(Qo, Matrix::Zero(3, 3), 8);
  CHECK(oracle::rel_err(U, Qo * Qo.transpose()) < 1e-12);
  CHECK(oracle::rel_err(U * U, U) < 1e-12);

  const Problem p = make_problem(3, 30, 1, 10, 0.05);
  const Matrix Psi = difference_penalty(p.centers, 0, 2);
  double prev = 1e300;
  for (double lambda : {1e-8, 1e-6, 1e-4, 1e-2, 1.0, 1e2}) {
    const PenalizedSystem sys(p.B, lambda * Psi, 30);
    const double tr = sys.trace_influence();
    CHECK(tr < prev);
    prev = tr;
    const Matrix Ul = sys.influence();
    CHECK((Ul - Ul.transpose()).norm() <= 1e-10 * Ul.norm());
    CHECK(oracle::rel_err(Ul, oracle::influence(p.B, lambda * Psi, 30)) < 1e-8);
    CHECK(oracle::rel_err(Vector(Ul * p.Y), Vector(p.B * sys.weights(p.Y))) < 1e-9);
    CHECK(oracle::rel_err(sys.trace_influence_squared(), (Ul * Ul.transpose()).trace()) < 1e-9);
  }
}

TEST_CASE("gcv") {
  std::mt19937_64 gen(10);
  const Matrix B = oracle::random_matrix(gen, 6, 2);
  const Vector Y = oracle::random_matrix(gen, 6, 1);
  CHECK(gcv(B, Y, 1e14 * Matrix::Identity(2, 2), 6) ==
        doctest::Approx(Y.squaredNorm() / 6).epsilon(1e-9));

  try {
    gcv(Matrix::Identity(4, 4), Vector::Ones(4), Matrix::Zero(4, 4), 4);
    FAIL("expected degenerate GCV");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::DegenerateGcv);
  }

  Matrix X(3, 1);
  X << 0.0, 0.5, 1.0;
  const Matrix B3 = gram(X, 0.3).G.leftCols(2);
  const Vector Y3 = (Vector(3) << 1.0, 2.0, 0.5).finished();
  const Matrix P3 = 0.1 * difference_penalty(X.topRows(2), 0, 1);
  CHECK(oracle::rel_err(gcv(B3, Y3, P3, 3), oracle::gcv(B3, Y3, P3, 3)) < 1e-10);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Problem p = make_problem(100 + seed, 12, 2, 5, 0.3);
    const Matrix P = oracle::penalty(p.centers, {2, 1}, {0.02, 0.5});
    CHECK(oracle::rel_err(gcv(p.B, p.Y, P, 12), oracle::gcv(p.B, p.Y, P, 12)) < 1e-9);
  }
}

TEST_CASE("penalty_orders") {
  const auto q2 = penalty_orders(2);
  REQUIRE(q2.size() == 4);
  CHECK(q2[0] == std::vector<int>{1, 1});
  CHECK(q2[1] == std::vector<int>{1, 2});
  CHECK(q2[2] == std::vector<int>{2, 1});
  CHECK(q2[3] == std::vector<int>{2, 2});
  CHECK(penalty_orders(1).size() == 2);
  CHECK(penalty_orders(3).size() == 8);
}

TEST_CASE("optimize_gcv") {
  SUBCASE("pure noise is smoothed heavily") {
    Problem p = make_problem(12, 80, 1, 12, 0.02);
    Rng rng(3);
    for (Index i = 0; i < p.Y.size(); ++i)
      p.Y[i] = rng.normal();
    const FittedScale fs = optimize_gcv(p.B, p.Y, p.centers, 80);
    const double var_y = (p.Y.array() - p.Y.mean()).square().mean();
    const double var_f = (fs.fitted.array() - fs.fitted.mean()).square().mean();
    CHECK(var_f < 0.5 * var_y);
    CHECK(fs.theta.size() == 12);
    CHECK(fs.comp == doctest::Approx(1 - 12.0 / 80));
    CHECK(fs.cost == doctest::Approx(gcv(p.B, p.Y, penalty_operator({fs.q, fs.lambda}, p.centers).P, 80)).epsilon(1e-10));
  }

  SUBCASE("linear data prefers second differences") {
    // Centers extend past the data, so a coefficient ramp reproduces a line.
    Problem p;
    p.eps = 0.02;
    p.X.resize(40, 1);
    for (Index i = 0; i < 40; ++i)
      p.X(i, 0) = static_cast<double>(i) / 39.0;
    p.centers.resize(21, 1);
    for (Index j = 0; j < 21; ++j)
      p.centers(j, 0) = -0.5 + 0.1 * static_cast<double>(j);
    p.B = cross_kernel(p.X, p.centers, p.eps);
    p.Y = 2.0 * p.X.col(0).array() + 1.0;
    double best1 = 1e300, best2 = 1e300;
    const Matrix Psi1 = difference_penalty(p.centers, 0, 1);
    const Matrix Psi2 = difference_penalty(p.centers, 0, 2);
    for (int k = 0; k <= 40; ++k) {
      const double lambda = std::pow(10.0, -8.0 + 0.25 * k);
      best1 = std::min(best1, gcv(p.B, p.Y, lambda * Psi1, 40));
      best2 = std::min(best2, gcv(p.B, p.Y, lambda * Psi2, 40));
    }
    CHECK(best2 <= best1);
    const FittedScale fs = optimize_gcv(p.B, p.Y, p.centers, 40);
    CHECK(fs.cost <= best1 * (1 + 1e-9));
  }

  SUBCASE("two dimensions") {
    const Problem p = make_problem(14, 60, 2, 15, 0.1);
    const FittedScale fs = optimize_gcv(p.B, p.Y, p.centers, 60);
    CHECK(fs.q.size() == 2);
    CHECK(fs.lambda.size() == 2);
    for (double l : fs.lambda) {
      CHECK(l >= 1e-8 * (1 - 1e-12));
      CHECK(l <= 1e2 * (1 + 1e-12));
    }
    for (const auto &Q : penalty_orders(2)) {
      const Matrix P = penalty_operator({Q, fs.lambda}, p.centers).P;
      CHECK(fs.cost <= gcv(p.B, p.Y, P, 60) * (1 + 1e-9));
    }
  }
}

TEST_CASE("representer") {
  const Problem p = make_problem(20, 40, 1, 12, 0.05);
  const Matrix P = penalty_operator({{2}, {1e-3}}, p.centers).P;
  const Vector theta = solve_weights(p.B, p.Y, P, 40);
  std::mt19937_64 gen(1);
  for (int k = 0; k < 50; ++k) {
    const Vector x = oracle::random_matrix(gen, 1, 1);
    const RepresenterOracle r = representer(x, p.B, P, p.X, p.eps, p.selected, 40);
    const double direct = cross_kernel(x.transpose(), p.centers, p.eps).row(0).dot(theta);
    CHECK(std::abs(p.Y.dot(r.M_lambda) - direct) <= 1e-8 * (1 + std::abs(direct)));
    CHECK(r.R_x.size() == 40);
  }

  const Problem w = make_problem(21, 40, 1, 8, 0.002);
  const Vector x = (Vector(1) << 0.37).finished();
  const RepresenterOracle r0 = representer(x, w.B, Matrix::Zero(8, 8), w.X, w.eps, w.selected, 40);
  CHECK(oracle::rel_err(r0.M_lambda, r0.M_zero) < 1e-8);
  CHECK_THROWS_AS(representer(Vector::Constant(2, 0.1), p.B, P, p.X, p.eps, p.selected, 40), Error);
}
