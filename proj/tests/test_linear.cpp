#include <cmath>
#include <random>

#include "doctest.h"

#include "cmsent/linear.hpp"
#include "cmsent/nb.hpp"
#include "oracles.hpp"

using namespace cmsent;
using Rows = std::vector<Eigen::SparseVector<double>>;

namespace {

Eigen::SparseVector<double> sparse(const std::vector<double>& dense) {
  Eigen::SparseVector<double> v(static_cast<Eigen::Index>(dense.size()));
  for (std::size_t j = 0; j < dense.size(); ++j)
    if (dense[j] != 0.0) v.insertBack(static_cast<Eigen::Index>(j)) = dense[j];
  return v;
}

Rows to_rows(const std::vector<std::vector<double>>& dense) {
  Rows rows;
  for (const auto& d : dense) rows.push_back(sparse(d));
  return rows;
}

// Dense reference objective, written independently of the library.
double dense_logistic(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                      const std::vector<double>& theta, double lambda) {
  const std::size_t d = X.front().size();
  double loss = 0, reg = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    double z = theta[d];
    for (std::size_t j = 0; j < d; ++j) z += theta[j] * X[i][j];
    loss += std::log(1.0 + std::exp(-y[i] * z));
  }
  for (std::size_t j = 0; j < d; ++j) reg += theta[j] * theta[j];
  return loss / static_cast<double>(X.size()) + lambda * reg;
}

TrainConfig config(Loss loss, double lambda, int epochs = 500, double tol = 1e-8) {
  TrainConfig c;
  c.loss = loss;
  c.lambda = lambda;
  c.epochs = epochs;
  c.tol = tol;
  return c;
}

}  // namespace

TEST_CASE("nb_log_ratio: worked examples") {
  const Rows rows = to_rows({{1, 0}, {0, 1}});
  const std::vector<int> signs = {1, -1};
  const auto r = nb_log_ratio<double>(rows, signs, 1.0);
  CHECK(r[0] == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(r[1] == doctest::Approx(-std::log(2.0)).epsilon(1e-15));

  const auto sym = nb_log_ratio<double>(to_rows({{1, 2}, {1, 2}}), signs, 1.0);
  CHECK(sym.cwiseAbs().maxCoeff() == 0.0);

  // Feature 2 never occurs: its ratio is ln(|q|_1 / |p|_1).
  const Rows absent = to_rows({{3, 0, 0}, {1, 1, 0}, {0, 2, 0}});
  const auto ra = nb_log_ratio<double>(absent, std::vector<int>{1, -1, -1}, 0.5);
  const double p_norm = 3.5 + 0.5 + 0.5, q_norm = 1.5 + 3.5 + 0.5;
  CHECK(ra[2] == doctest::Approx(std::log(q_norm / p_norm)).epsilon(1e-14));
}

TEST_CASE("nb_log_ratio: errors") {
  const Rows rows = to_rows({{1, 0}, {0, 1}});
  CHECK_THROWS_AS(nb_log_ratio<double>(rows, std::vector<int>{1, 1}, 1.0), TrainError);
  CHECK_THROWS_AS(nb_log_ratio<double>(rows, std::vector<int>{1}, 1.0), TrainError);
  CHECK_THROWS_AS(nb_log_ratio<double>(Rows{}, std::vector<int>{}, 1.0), TrainError);
  CHECK_THROWS_AS(nb_log_ratio<double>(rows, std::vector<int>{1, -1}, 0.0), TrainError);
}

TEST_CASE("nb_log_ratio: sign property and binarized counts") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> count(0, 4);
  for (int round = 0; round < 200; ++round) {
    const int n = std::uniform_int_distribution<int>(2, 8)(rng);
    const int d = std::uniform_int_distribution<int>(1, 6)(rng);
    std::vector<std::vector<double>> X(n, std::vector<double>(d));
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) {
      y[i] = i == 0 ? 1 : i == 1 ? -1 : (rng() & 1 ? 1 : -1);
      for (int j = 0; j < d; ++j) X[i][j] = count(rng);
    }
    const double alpha = 0.5 + (rng() % 4) * 0.5;
    const auto r = nb_log_ratio<double>(to_rows(X), y, alpha);

    std::vector<double> p(d, alpha), q(d, alpha);
    double np = 0, nq = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) (y[i] > 0 ? p : q)[j] += X[i][j];
    for (int j = 0; j < d; ++j) np += p[j], nq += q[j];
    for (int j = 0; j < d; ++j) {
      const double rel_in = p[j] / np, rel_out = q[j] / nq;
      if (std::abs(rel_in - rel_out) > 1e-12) CHECK((r[j] > 0) == (rel_in > rel_out));
    }

    auto binary = X;
    for (auto& row : binary)
      for (auto& v : row) v = v > 0 ? 1.0 : 0.0;
    const auto rb = nb_log_ratio<double>(to_rows(X), y, alpha, true);
    const auto expected = oracle::brute_force_nb_ratio(binary, y, alpha);
    for (int j = 0; j < d; ++j) CHECK(std::abs(rb[j] - expected[j]) <= 1e-12);
  }
}

TEST_CASE("nb_log_ratio is generic over the scalar type") {
  std::vector<Eigen::SparseVector<float>> rows(2, Eigen::SparseVector<float>(2));
  rows[0].insertBack(0) = 1.0f;
  rows[1].insertBack(1) = 1.0f;
  const auto r = nb_log_ratio<float>(rows, std::vector<int>{1, -1}, 1.0f);
  CHECK(r[0] == doctest::Approx(std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("scale_features") {
  DenseVec<double> r(3);
  r << 0.693, 0.0, 2.0;
  const auto x = sparse({1.0, 0.0, 0.0});
  const auto s = scale_features<double>(x, r);
  REQUIRE(s.nonZeros() == 1);
  CHECK(s.coeff(0) == doctest::Approx(0.693));

  const auto y = sparse({1.0, 3.0, 0.5});
  const auto sy = scale_features<double>(y, r);
  CHECK(sy.nonZeros() == 2);  // the zero ratio entry is dropped
  CHECK(sy.coeff(2) == 1.0);

  const auto ones = scale_features<double>(y, DenseVec<double>::Ones(3));
  CHECK((Eigen::VectorXd(ones) - Eigen::VectorXd(y)).norm() == 0.0);
  CHECK(scale_features<double>(Eigen::SparseVector<double>(3), r).nonZeros() == 0);
  CHECK_THROWS_AS(scale_features<double>(sparse({1.0}), r), std::invalid_argument);
}

TEST_CASE("interpolate") {
  DenseVec<double> w(2);
  w << 4, -2;
  CHECK(interpolate<double>(w, 1.0) == w);
  const auto mid = interpolate<double>(w, 0.25);
  CHECK(mid[0] == doctest::Approx(3.25));
  CHECK(mid[1] == doctest::Approx(1.75));
  const auto flat = interpolate<double>(w, 0.0);
  CHECK(flat[0] == 3.0);
  CHECK(flat[1] == 3.0);
  CHECK_THROWS_AS(interpolate<double>(w, 1.5), std::invalid_argument);
  CHECK(interpolate<double>(DenseVec<double>(0), 0.5).size() == 0);
}

TEST_CASE("logistic gradient matches central differences") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> gauss;
  for (int round = 0; round < 20; ++round) {
    const int n = 15, d = 10;
    std::vector<std::vector<double>> X(n, std::vector<double>(d));
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) {
      y[i] = rng() & 1 ? 1 : -1;
      for (int j = 0; j < d; ++j) X[i][j] = (rng() % 3 == 0) ? 0.0 : gauss(rng);
    }
    std::vector<double> theta(d + 1);
    for (auto& t : theta) t = 0.5 * gauss(rng);
    const double lambda = 0.01 * (1 + rng() % 10);

    const Rows rows = to_rows(X);
    const Eigen::Map<const DenseVec<double>> w(theta.data(), d);
    DenseVec<double> gw;
    double gb = 0;
    const double f = logistic_gradient<double>(rows, y, w, theta[d], lambda, gw, gb);
    CHECK(f == doctest::Approx(dense_logistic(X, y, theta, lambda)).epsilon(1e-12));
    CHECK(logistic_objective<double>(rows, y, w, theta[d], lambda) == doctest::Approx(f).epsilon(1e-14));

    const auto fd = oracle::central_differences(
        [&](const std::vector<double>& t) { return dense_logistic(X, y, t, lambda); }, theta, 1e-5);
    for (int j = 0; j <= d; ++j) {
      const double a = j < d ? gw[j] : gb;
      const double rel = std::abs(a - fd[j]) / std::max({std::abs(a), std::abs(fd[j]), 1e-6});
      CHECK(rel <= 1e-5);
    }
  }
}

TEST_CASE("train_linear: separable points, both losses") {
  const Rows rows = to_rows({{1.0, 0.2}, {-1.0, 0.1}, {0.8, -0.3}, {-0.7, -0.2}});
  const std::vector<int> y = {1, -1, 1, -1};
  for (Loss loss : {Loss::Logistic, Loss::Hinge}) {
    const auto fit = train_linear<double>(rows, y, config(loss, 1e-3, 200));
    for (std::size_t i = 0; i < rows.size(); ++i)
      CHECK(y[i] * (rows[i].dot(fit.w) + fit.b) > 0);
  }
}

TEST_CASE("train_linear: heavy regularization drives w to zero") {
  const Rows rows = to_rows({{1.0, 0.5}, {-1.0, 0.5}, {0.3, -1.0}});
  const std::vector<int> y = {1, -1, 1};
  for (Loss loss : {Loss::Logistic, Loss::Hinge}) {
    const auto fit = train_linear<double>(rows, y, config(loss, 1e6, 100));
    CHECK(fit.w.norm() <= 1e-3);
  }
}

TEST_CASE("train_linear: logistic fit reaches the gradient tolerance") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  std::vector<std::vector<double>> X(40, std::vector<double>(8));
  std::vector<int> y(40);
  for (int i = 0; i < 40; ++i) {
    for (auto& v : X[i]) v = gauss(rng);
    y[i] = X[i][0] + 0.5 * gauss(rng) > 0 ? 1 : -1;
  }
  const Rows rows = to_rows(X);
  const auto cfg = config(Loss::Logistic, 1e-2, 1000, 1e-9);
  const auto fit = train_linear<double>(rows, y, cfg);
  CHECK(fit.converged);
  DenseVec<double> gw;
  double gb = 0;
  logistic_gradient<double>(rows, y, fit.w, fit.b, cfg.lambda, gw, gb);
  CHECK(std::sqrt(gw.squaredNorm() + gb * gb) <= cfg.tol);
}

TEST_CASE("train_linear: two-point problem matches a brute-force grid minimum") {
  const std::vector<std::vector<double>> X = {{2.0}, {0.5}};
  const std::vector<int> y = {1, -1};
  const double lambda = 0.1;
  const auto fit = train_linear<double>(to_rows(X), y, config(Loss::Logistic, lambda, 1000, 1e-10));
  const double got = dense_logistic(X, y, {fit.w[0], fit.b}, lambda);

  // Zooming grid search over (w, b).
  double cw = 0, cb = 0, span = 10, best = dense_logistic(X, y, {0, 0}, lambda);
  for (int level = 0; level < 6; ++level) {
    double bw = cw, bb = cb;
    for (int i = -50; i <= 50; ++i)
      for (int j = -50; j <= 50; ++j) {
        const double w = cw + span * i / 50.0, b = cb + span * j / 50.0;
        const double f = dense_logistic(X, y, {w, b}, lambda);
        if (f < best) best = f, bw = w, bb = b;
      }
    cw = bw, cb = bb, span /= 10;
  }
  CHECK(std::abs(got - best) <= 1e-3);
  CHECK(got <= best + 1e-9);
}

TEST_CASE("train_linear: hinge is deterministic for a seed") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> gauss;
  std::vector<std::vector<double>> X(30, std::vector<double>(5));
  std::vector<int> y(30);
  for (int i = 0; i < 30; ++i) {
    for (auto& v : X[i]) v = gauss(rng);
    y[i] = X[i][1] > 0 ? 1 : -1;
  }
  const Rows rows = to_rows(X);
  auto cfg = config(Loss::Hinge, 1e-3, 50);
  const auto a = train_linear<double>(rows, y, cfg);
  const auto b = train_linear<double>(rows, y, cfg);
  CHECK(a.w == b.w);
  CHECK(a.b == b.b);
  cfg.seed = 99;
  const auto c = train_linear<double>(rows, y, cfg);
  CHECK(c.w != a.w);
  // Averaged iterate should be close to the optimum of the convex objective.
  CHECK(hinge_objective<double>(rows, y, a.w, a.b, 1e-3) < 0.2);
}

TEST_CASE("train_linear: preconditions") {
  const Rows rows = to_rows({{1.0}, {2.0}});
  CHECK_THROWS_AS(train_linear<double>(rows, std::vector<int>{1, 1}, TrainConfig{}), TrainError);
  CHECK_THROWS_AS(train_linear<double>(rows, std::vector<int>{1, 0}, TrainConfig{}), TrainError);
  TrainConfig bad;
  bad.lambda = 0;
  CHECK_THROWS_AS(train_linear<double>(rows, std::vector<int>{1, -1}, bad), std::invalid_argument);
  const Rows inf = to_rows({{std::numeric_limits<double>::infinity()}, {1.0}});
  CHECK_THROWS_AS(train_linear<double>(inf, std::vector<int>{1, -1}, TrainConfig{}), TrainError);
}

TEST_CASE("train_linear works in single precision") {
  std::vector<Eigen::SparseVector<float>> rows(2, Eigen::SparseVector<float>(1));
  rows[0].insertBack(0) = 1.0f;
  rows[1].insertBack(0) = -1.0f;
  const auto fit = train_linear<float>(rows, std::vector<int>{1, -1}, config(Loss::Logistic, 1e-2, 100, 1e-4));
  CHECK(fit.w[0] > 0.0f);
}
