#include "../oracles.hpp"

#include "hrn/error.hpp"
#include "hrn/hierarchy.hpp"
#include "hrn/penalty.hpp"
#include "hrn/predict.hpp"
#include "hrn/student_t.hpp"
#include "hrn/synth.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <doctest.h>

#include <random>

using namespace hrn;

namespace {

SparseModel hand_model(const Matrix &X_t, const Vector &C, double eps,
                       std::vector<double> lambda) {
  SparseModel m;
  m.X_t = X_t;
  m.C_t = C;
  m.Y_t = Vector::Zero(C.size());
  m.epsilon_t = eps;
  m.Lambda_t = std::move(lambda);
  m.Q_t.assign(m.Lambda_t.size(), 1);
  for (Index i = 0; i < C.size(); ++i)
    m.selected.push_back(i);
  return m;
}

} // namespace

TEST_CASE("predict_mean") {
  std::mt19937_64 gen(1);
  const Matrix X_t = oracle::random_matrix(gen, 6, 2);
  const Matrix Q = oracle::random_matrix(gen, 9, 2);
  CHECK(predict_mean(hand_model(X_t, Vector::Zero(6), 0.1, {1, 1}), Q).isZero(0.0));

  const SparseModel single = hand_model(Matrix::Zero(1, 1), Vector::Constant(1, 3.0), 2.0, {1});
  const Matrix far = Matrix::Constant(1, 1, 10.0);
  CHECK(predict_mean(single, far)[0] == doctest::Approx(3.0 * std::exp(-50.0)).epsilon(1e-12));
  CHECK(predict_mean(single, far)[0] < 1e-20);

  const Vector C = oracle::random_matrix(gen, 6, 1, -1, 1);
  const SparseModel m = hand_model(X_t, C, 0.2, {1, 1});
  CHECK(oracle::rel_err(predict_mean(m, Q), Vector(oracle::kernel(Q, X_t, 0.2) * C)) < 1e-13);
  CHECK_THROWS_AS(predict_mean(m, Matrix::Zero(3, 1)), Error);
}

TEST_CASE("fitted values and noiseless reproduction") {
  SynthSpec spec{SynthFamily::Schwefel1d, 150, 0.0, {}, 2};
  const Dataset D = sample(spec);
  const SparseModel m = fit(D);
  const Matrix B = cross_kernel(D.X, m.X_t, m.epsilon_t);
  const Matrix P = penalty_operator({m.Q_t, m.Lambda_t}, m.X_t).P;
  const Matrix U = oracle::influence(B, P, D.size());
  CHECK(oracle::rel_err(predict_mean(m, D.X), Vector(U * D.Y)) < 1e-8);

  const Vector at_centers = predict_mean(m, m.X_t);
  const double rms_fit = std::sqrt((predict_mean(m, D.X) - D.Y).squaredNorm() / 150);
  CHECK(std::sqrt((at_centers - m.Y_t).squaredNorm() / m.size()) <= 3 * rms_fit + 1e-9);
}

TEST_CASE("sigma2_hat and std") {
  std::mt19937_64 gen(17);
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const Matrix X = oracle::random_matrix(gen, 11, 1 + trial % 2);
    const Vector Y = oracle::random_matrix(gen, 11, 1, -1, 1);
    const Matrix X_t = X.topRows(4);
    const std::vector<double> lambda(X.cols(), 0.05);
    const Matrix B = oracle::kernel(X, X_t, 0.3);
    const Matrix P = oracle::penalty(X_t, std::vector<int>(X.cols(), 1), lambda);
    const Vector C = oracle::penalized_ls(B, Y, P, 11);
    const SparseModel m = hand_model(X_t, C, 0.3, lambda);
    const Dataset D{X, Y};
    CHECK(oracle::rel_err(sigma2_hat(m, D), oracle::sigma2(B, Y, C, P, 11)) < 1e-9);

    const Matrix Q = oracle::random_matrix(gen, 5, X.cols());
    const Vector s = predict_std(m, D, Q);
    const Matrix Bq = oracle::kernel(Q, X_t, 0.3);
    const Matrix Sinv = oracle::inverse(B.transpose() * B + 11.0 * P);
    const double s2 = oracle::sigma2(B, Y, C, P, 11);
    for (Index i = 0; i < 5; ++i) {
      const double form = Bq.row(i) * Sinv * Bq.row(i).transpose();
      CHECK(oracle::rel_err(s[i], std::sqrt(s2 * std::max(0.0, form))) < 1e-9);
      CHECK(s[i] >= 0.0);
    }
  }

  SUBCASE("zero residual") {
    const Matrix X = (Matrix(5, 1) << 0, 1, 2, 3, 4).finished();
    const Vector C = (Vector(2) << 1.0, -2.0).finished();
    const SparseModel m = hand_model(X.topRows(2), C, 1.5, {0.1});
    const Dataset D{X, oracle::kernel(X, X.topRows(2), 1.5) * C};
    CHECK(sigma2_hat(m, D) == doctest::Approx(0.0).epsilon(1e-20));
    CHECK(predict_std(m, D, X).maxCoeff() < 1e-9);
  }

  SUBCASE("single basis column") {
    // U is a rank-one projector, so df_res = n - 1.
    const Matrix X = (Matrix(6, 1) << 0, 1, 2, 3, 4, 5).finished();
    const Vector Y = (Vector(6) << 1, -1, 2, 0.5, 3, -2).finished();
    const SparseModel m = hand_model(X.topRows(1), Vector::Zero(1), 4.0, {1.0});
    const IntervalEstimator est(m, Dataset{X, Y});
    CHECK(est.trace_U() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(est.df_res() == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(est.sigma2_hat() == doctest::Approx(Y.squaredNorm() / 5).epsilon(1e-12));
  }

  SUBCASE("dense cluster versus the edge of the data") {
    const SynthSpec spec{SynthFamily::Schwefel1d, 300, 30.0, {}, 8};
    const Dataset D = sample(spec);
    const SparseModel m = fit(D);
    const double edge = D.X.col(0).maxCoeff() + 0.5 * std::sqrt(m.epsilon_t);
    Matrix q(2, 1);
    q << 0.0, edge;
    const Vector s = predict_std(m, D, q);
    CHECK(s[0] <= s[1]);
  }
}

TEST_CASE("student t") {
  CHECK(t_quantile(0.5, 3.0) == 0.0);
  CHECK(t_quantile(0.975, 10) == doctest::Approx(2.2281388519649385).epsilon(1e-9));
  CHECK(std::abs(t_quantile(0.975, 1e6) - 1.959966) < 1e-6);
  for (double df : {0.5, 1.0, 2.5, 7.0, 30.0, 1e3, 1e5}) {
    boost::math::students_t dist(df);
    for (double p : {1e-6, 0.001, 0.025, 0.2, 0.5, 0.8, 0.975, 0.999, 1 - 1e-6}) {
      const double expect = boost::math::quantile(dist, p);
      CHECK(std::abs(t_quantile(p, df) - expect) < 1e-6 * std::max(1.0, std::abs(expect)));
      CHECK(std::abs(t_cdf(expect, df) - p) < 1e-12 + 1e-10 * p);
    }
  }
  CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  CHECK(incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3));
  CHECK_THROWS_AS(t_quantile(0.0, 3), Error);
  CHECK_THROWS_AS(t_quantile(0.5, 0), Error);
}

TEST_CASE("confidence_intervals") {
  const Vector mean = (Vector(3) << 1, 2, 3).finished();
  auto [lo0, hi0] = confidence_intervals(mean, Vector::Zero(3), 10, 0.05);
  CHECK(lo0 == mean);
  CHECK(hi0 == mean);
  auto [lo, hi] = confidence_intervals(mean, Vector::Ones(3), 10, 0.05);
  CHECK((hi - mean)[0] == doctest::Approx(2.228139).epsilon(1e-6));
  CHECK((mean - lo)[2] == doctest::Approx(2.228139).epsilon(1e-6));
  double prev = 1e300;
  for (double alpha : {0.01, 0.05, 0.1, 0.3, 0.6}) {
    auto [l, h] = confidence_intervals(mean, Vector::Ones(3), 10, alpha);
    CHECK(h[0] - l[0] < prev);
    prev = h[0] - l[0];
  }
  CHECK_THROWS_AS(confidence_intervals(mean, Vector::Ones(3), 10, 1.0), Error);
}
