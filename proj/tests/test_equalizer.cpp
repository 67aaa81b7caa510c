#include <doctest.h>

#include <cmath>

#include "pameq/equalizer.hpp"
#include "pameq/rng.hpp"

using namespace pameq;

namespace {

VecX<double> vec(std::initializer_list<double> xs) {
  VecX<double> v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

VecX<double> random_vec(Eigen::Index n, Rng<double>& rng) {
  VecX<double> v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.gaussian();
  return v;
}

TrainingSet<double> from_matrix(const MatX<double>& R, const VecX<double>& Y) {
  TrainingSet<double> ts;
  ts.matrix_R = R;
  ts.vector_Y = Y;
  ts.N = R.cols();
  ts.M = R.rows() + R.cols() - 1;
  return ts;
}

TrainingSet<double> random_instance(Eigen::Index M, Eigen::Index N,
                                    Rng<double>& rng) {
  const VecX<double> received = random_vec(M, rng);
  const VecX<double> transmitted = random_vec(M, rng);
  return build_training_set(received, transmitted, N, 0);
}

}  // namespace

TEST_CASE("training matrix rows are reversed causal windows") {
  const VecX<double> received = vec({5, 4, 3, 2, 1});
  const VecX<double> transmitted = vec({10, 20, 30, 40, 50});
  const auto ts = build_training_set(received, transmitted, 3, 0);
  REQUIRE(ts.matrix_R.rows() == 3);
  REQUIRE(ts.matrix_R.cols() == 3);
  MatX<double> expected(3, 3);
  expected << 3, 4, 5, 2, 3, 4, 1, 2, 3;
  CHECK(ts.matrix_R == expected);
  // Targets align with the window's newest sample.
  CHECK(ts.vector_Y == vec({30, 40, 50}));
  CHECK(ts.M == 5);
  CHECK(ts.N == 3);
}

TEST_CASE("offset shifts the target backwards in time") {
  const VecX<double> received = vec({5, 4, 3, 2, 1});
  const VecX<double> transmitted = vec({10, 20, 30, 40, 50});
  const auto ts = build_training_set(received, transmitted, 3, 2);
  CHECK(ts.vector_Y == vec({10, 20, 30}));
}

TEST_CASE("row count is M - N + 1 and the matrix is toeplitz") {
  Rng<double> rng(17);
  const auto ts = random_instance(300, 181, rng);
  REQUIRE(ts.matrix_R.rows() == 120);
  REQUIRE(ts.matrix_R.cols() == 181);
  for (Eigen::Index r = 0; r + 1 < ts.matrix_R.rows(); ++r)
    for (Eigen::Index c = 0; c + 1 < ts.matrix_R.cols(); ++c)
      CHECK(ts.matrix_R(r, c) == ts.matrix_R(r + 1, c + 1));
}

TEST_CASE("full-length window yields a single row") {
  Rng<double> rng(18);
  const auto ts = random_instance(40, 40, rng);
  CHECK(ts.matrix_R.rows() == 1);
}

TEST_CASE("training-set preconditions") {
  const VecX<double> r = vec({1, 2, 3, 4});
  CHECK_THROWS_AS(build_training_set(r, r, 5, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_training_set(r, r, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_training_set(r, r, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_training_set(r, r, 2, -1), std::invalid_argument);
  CHECK_THROWS_AS(build_training_set(r, vec({1, 2}), 2, 0),
                  std::invalid_argument);
}

TEST_CASE("cost examples by hand") {
  const auto exact =
      from_matrix(MatX<double>::Identity(2, 2), vec({1, 1}));
  CHECK(mse_cost(exact, vec({1, 1})) == 0.0);
  MatX<double> R(2, 2);
  R << 1, 2, 3, 4;
  const auto ts = from_matrix(R, vec({1, 1}));
  // Residuals [2, 6] -> (4 + 36) / 2.
  CHECK(mse_cost(ts, vec({1, 1})) == 20.0);
  CHECK(mse_cost(ts, vec({0, 0})) == 1.0);  // mean of Y squared
  CHECK_THROWS_AS(mse_cost(ts, vec({1, 2, 3})), std::invalid_argument);
}

TEST_CASE("gradient example by hand and at the optimum") {
  MatX<double> R(2, 2);
  R << 1, 2, 3, 4;
  const auto ts = from_matrix(R, vec({1, 1}));
  CHECK(gradient(ts, vec({1, 1})) == vec({20, 28}));
  CHECK_THROWS_AS(gradient(ts, vec({1})), std::invalid_argument);
  Rng<double> rng(23);
  const auto inst = random_instance(60, 5, rng);
  const VecX<double> w_star = closed_form_solution(inst);
  CHECK(gradient(inst, w_star).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("gradient matches central finite differences") {
  Rng<double> rng(29);
  const double h = 1e-6;
  for (int trial = 0; trial < 120; ++trial) {
    const Eigen::Index N = 1 + static_cast<Eigen::Index>(rng.uniform() * 8);
    const Eigen::Index M =
        N + 1 + static_cast<Eigen::Index>(rng.uniform() * (50 - N));
    const auto ts = random_instance(M, N, rng);
    const VecX<double> w = random_vec(N, rng);
    const VecX<double> g = gradient(ts, w);
    const double scale = std::max(1.0, g.lpNorm<Eigen::Infinity>());
    for (Eigen::Index i = 0; i < N; ++i) {
      VecX<double> up = w, down = w;
      up[i] += h;
      down[i] -= h;
      const double fd = (mse_cost(ts, up) - mse_cost(ts, down)) / (2 * h);
      CHECK(std::abs(g[i] - fd) <= 1e-6 * scale);
    }
  }
}

TEST_CASE("cost is convex along sampled segments") {
  Rng<double> rng(31);
  const auto ts = random_instance(50, 6, rng);
  for (int trial = 0; trial < 50; ++trial) {
    const VecX<double> a = random_vec(6, rng);
    const VecX<double> b = random_vec(6, rng);
    const double lambda = rng.uniform();
    const VecX<double> mid = lambda * a + (1 - lambda) * b;
    CHECK(mse_cost(ts, mid) <=
          lambda * mse_cost(ts, a) + (1 - lambda) * mse_cost(ts, b) + 1e-9);
  }
}

TEST_CASE("closed-form solution examples") {
  const auto eye = from_matrix(MatX<double>::Identity(2, 2), vec({3, -2}));
  CHECK((closed_form_solution(eye) - vec({3, -2})).lpNorm<Eigen::Infinity>() <
        1e-12);
  MatX<double> D(2, 2);
  D << 1, 0, 0, 2;
  const auto diag = from_matrix(D, vec({1, 4}));
  CHECK((closed_form_solution(diag) - vec({1, 2})).lpNorm<Eigen::Infinity>() <
        1e-12);
}

TEST_CASE("closed-form solution beats sampled competitors") {
  Rng<double> rng(37);
  const auto ts = random_instance(80, 7, rng);
  const VecX<double> w_star = closed_form_solution(ts);
  const double j_star = mse_cost(ts, w_star);
  for (int trial = 0; trial < 100; ++trial) {
    const VecX<double> w = random_vec(7, rng);
    CHECK(j_star <= mse_cost(ts, w) + 1e-12);
  }
}

TEST_CASE("rank-deficient normal matrix raises with a condition estimate") {
  MatX<double> R(2, 2);
  R << 1, 1, 1, 1;
  const auto ts = from_matrix(R, vec({1, 2}));
  CHECK_THROWS_AS(closed_form_solution(ts), SingularMatrix);
  try {
    closed_form_solution(ts);
  } catch (const SingularMatrix& e) {
    CHECK(e.condition_estimate() >= 1e12);
  }
}

TEST_CASE("equalize identity, delay, and training-row consistency") {
  CHECK(equalize(vec({1, 2, 3}), vec({1, 0})) == vec({1, 2, 3}));
  CHECK(equalize(vec({1, 2, 3}), vec({0, 1})) == vec({0, 1, 2}));
  CHECK_THROWS_AS(equalize(VecX<double>(), vec({1})), std::invalid_argument);
  CHECK_THROWS_AS(equalize(vec({1}), VecX<double>()), std::invalid_argument);
  // Rows N-1.. of the filtered stream reproduce matrix_R * w.
  Rng<double> rng(41);
  const VecX<double> received = random_vec(64, rng);
  const VecX<double> transmitted = random_vec(64, rng);
  const auto ts = build_training_set(received, transmitted, 5, 0);
  const VecX<double> w = random_vec(5, rng);
  const VecX<double> filtered = equalize(received, w);
  const VecX<double> rows = ts.matrix_R * w;
  CHECK((filtered.segment(4, rows.size()) - rows).lpNorm<Eigen::Infinity>() <
        1e-12);
}

TEST_CASE("equalize is linear in both arguments") {
  Rng<double> rng(43);
  const VecX<double> x = random_vec(50, rng);
  const VecX<double> y = random_vec(50, rng);
  const VecX<double> w1 = random_vec(4, rng);
  const VecX<double> w2 = random_vec(4, rng);
  const VecX<double> in_signal =
      equalize<double>(2.0 * x + 3.0 * y, w1) -
      (2.0 * equalize(x, w1) + 3.0 * equalize(y, w1));
  CHECK(in_signal.lpNorm<Eigen::Infinity>() < 1e-12);
  const VecX<double> in_taps =
      equalize<double>(x, w1 + w2) - (equalize(x, w1) + equalize(x, w2));
  CHECK(in_taps.lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("reduction is bit-identical for any worker count") {
  Rng<double> rng(47);
  // Enough rows to span several reduction blocks.
  const auto ts = random_instance(1500, 9, rng);
  const VecX<double> w = random_vec(9, rng);
  const double j1 = mse_cost(ts, w, 1);
  const VecX<double> g1 = gradient(ts, w, 1);
  for (int workers : {2, 3, 5, 8, 16}) {
    CHECK(mse_cost(ts, w, workers) == j1);
    CHECK(gradient(ts, w, workers) == g1);
  }
  const auto both = cost_and_gradient(ts, w, 7);
  CHECK(both.first == j1);
  CHECK(both.second == g1);
}
