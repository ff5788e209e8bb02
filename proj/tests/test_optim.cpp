// Solver contracts. The elastic net is checked against closed forms
// (normal equations at alpha=0, soft-thresholding under orthonormal
// columns) and its own subgradient conditions; the SVR is checked against
// hand cases and an independent brute-force grid search over the dual.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oscimark/elastic_net.hpp"
#include "oscimark/rng.hpp"
#include "oscimark/svr.hpp"
#include "oracle_svr.hpp"
#include "test_util.hpp"

using namespace oscimark;
using namespace testutil;

namespace {

double soft(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

TEST_CASE("elastic net at alpha=0 matches the least-squares solution") {
  const Eigen::MatrixXd X = gaussian_matrix(20, 5, 1);
  const Eigen::VectorXd y = gaussian_matrix(20, 1, 2);
  ElasticNetConfig cfg;
  cfg.alpha = 0.0;
  const ElasticNetResult res = elastic_net_fit(X, y, cfg);
  const Eigen::VectorXd ols = (X.transpose() * X).ldlt().solve(X.transpose() * y);
  CHECK(res.converged);
  CHECK((res.beta - ols).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("orthonormal columns at lambda=1 give exact soft-thresholding") {
  const Eigen::MatrixXd raw = gaussian_matrix(20, 5, 3);
  const Eigen::MatrixXd Q =
      Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ() *
      Eigen::MatrixXd::Identity(20, 5);
  const Eigen::VectorXd y = gaussian_matrix(20, 1, 4);

  ElasticNetConfig cfg;
  cfg.alpha = 0.6;
  cfg.lambda = 1.0;
  const ElasticNetResult res = elastic_net_fit(Q, y, cfg);
  const Eigen::VectorXd ols = Q.transpose() * y;  // Q'Q = I
  CHECK((res.beta - ols.unaryExpr([&](double v) { return soft(v, cfg.alpha / 2.0); }))
            .cwiseAbs()
            .maxCoeff() <= 1e-9);
}

TEST_CASE("overwhelming penalty zeroes every coefficient") {
  const Eigen::MatrixXd X = gaussian_matrix(15, 4, 5);
  const Eigen::VectorXd y = gaussian_matrix(15, 1, 6);
  ElasticNetConfig cfg;
  cfg.alpha = 1e6;
  const ElasticNetResult res = elastic_net_fit(X, y, cfg);
  CHECK(res.beta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("objective is non-increasing across sweeps") {
  const Eigen::MatrixXd X = gaussian_matrix(30, 12, 7);
  const Eigen::VectorXd y = gaussian_matrix(30, 1, 8);
  ElasticNetConfig cfg;
  cfg.track_objective = true;
  const ElasticNetResult res = elastic_net_fit(X, y, cfg);
  REQUIRE(res.objective_trace.size() >= 2);
  for (std::size_t i = 1; i < res.objective_trace.size(); ++i)
    CHECK(res.objective_trace[i] <= res.objective_trace[i - 1] + 1e-9);
}

TEST_CASE("converged solutions satisfy the subgradient conditions") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Eigen::MatrixXd X = gaussian_matrix(25, 8, 100 + seed);
    const Eigen::VectorXd y = gaussian_matrix(25, 1, 200 + seed);
    ElasticNetConfig cfg;
    cfg.alpha = 2.0;
    cfg.lambda = 0.8;
    const ElasticNetResult res = elastic_net_fit(X, y, cfg);
    REQUIRE(res.converged);
    const Eigen::VectorXd grad =
        2.0 * X.transpose() * (y - X * res.beta) - 2.0 * cfg.alpha * (1.0 - cfg.lambda) * res.beta;
    for (Eigen::Index j = 0; j < res.beta.size(); ++j) {
      if (res.beta[j] == 0.0)
        CHECK(std::abs(grad[j]) <= cfg.alpha * cfg.lambda + 1e-6);
      else
        CHECK(grad[j] == doctest::Approx(cfg.alpha * cfg.lambda *
                                         (res.beta[j] > 0 ? 1.0 : -1.0))
                             .epsilon(1e-5));
    }
  }
}

TEST_CASE("warm starts land on the same solution") {
  const Eigen::MatrixXd X = gaussian_matrix(25, 8, 9);
  const Eigen::VectorXd y = gaussian_matrix(25, 1, 10);
  ElasticNetConfig cfg;
  const ElasticNetResult cold = elastic_net_fit(X, y, cfg);
  Eigen::VectorXd perturbed = cold.beta;
  if (perturbed.size() > 0) perturbed[0] += 0.05;
  const ElasticNetResult warm = elastic_net_fit(X, y, cfg, &perturbed);
  CHECK((cold.beta - warm.beta).cwiseAbs().maxCoeff() <= 1e-5);
}

TEST_CASE("SVR fits the line y = 2x through the tube") {
  Eigen::MatrixXd X(3, 1);
  X << 0, 1, 2;
  Eigen::VectorXd y(3);
  y << 0, 2, 4;
  const SvrModel model = svr_fit(X, y, 1e3, 0.01);
  CHECK(model.converged);
  CHECK(std::abs(model.w[0] - 2.0) < 0.02);
  CHECK(std::abs(model.b) < 0.02);

  Eigen::MatrixXd probe(1, 1);
  probe << 1.5;
  CHECK(svr_predict(model, probe)[0] == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("a single point inside the tube gives the degenerate flat model") {
  Eigen::MatrixXd X(1, 1);
  X << 3;
  Eigen::VectorXd y(1);
  y << 5;
  const SvrModel model = svr_fit(X, y, 1.0, 0.1);
  CHECK(model.w.cwiseAbs().maxCoeff() == 0.0);
  CHECK(model.b == doctest::Approx(5.0));
}

TEST_CASE("svr_predict basics") {
  SvrModel model;
  model.w = Eigen::VectorXd::Zero(2);
  model.b = 4.25;
  const Eigen::MatrixXd X = gaussian_matrix(6, 2, 11);
  const Eigen::VectorXd pred = svr_predict(model, X);
  for (Eigen::Index i = 0; i < pred.size(); ++i) CHECK(pred[i] == 4.25);

  CHECK(svr_predict(model, Eigen::MatrixXd(0, 2)).size() == 0);
  CHECK_THROWS(svr_predict(model, Eigen::MatrixXd::Zero(2, 5)));
}

TEST_CASE("prediction is affine in the inputs") {
  const Eigen::MatrixXd X = gaussian_matrix(12, 3, 12);
  const Eigen::VectorXd y = gaussian_matrix(12, 1, 13);
  const SvrModel model = svr_fit(X, y, 10.0, 0.1);

  Eigen::RowVectorXd shift(3);
  shift << 0.5, -1.0, 2.0;
  const Eigen::MatrixXd shifted = X.rowwise() + shift;
  const Eigen::VectorXd delta = svr_predict(model, shifted) - svr_predict(model, X);
  const double expect = model.w.dot(shift.transpose());
  CHECK((delta.array() - expect).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("dual iterates stay in the box and meet the KKT tolerance") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::MatrixXd X = gaussian_matrix(8, 3, 300 + seed);
    const Eigen::VectorXd y = 2.0 * gaussian_matrix(8, 1, 400 + seed);
    const double C = 5.0, eps = 0.1;
    const Eigen::MatrixXd K = X * X.transpose();
    const SvrDualResult res = svr_fit_kernel(K, y, C, eps);
    REQUIRE(res.converged);
    CHECK(res.beta.cwiseAbs().maxCoeff() <= C + 1e-12);
    CHECK(std::abs(res.beta.sum()) <= 1e-9);
    CHECK(svr_kkt_violation(K, y, res.beta, C, eps) <= 1e-6);
  }
}

TEST_CASE("50 random 4-point instances match the dual grid oracle") {
  auto rng = make_rng(2024);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int inst = 0; inst < 50; ++inst) {
    const Eigen::MatrixXd X = gaussian_matrix(4, 2, 500 + inst);
    const Eigen::VectorXd y = 2.0 * gaussian_matrix(4, 1, 600 + inst);
    const double C = std::pow(10.0, -1.0 + 2.0 * unif(rng));  // 0.1 .. 10
    const double eps = 0.01 + 0.99 * unif(rng);

    const SvrModel model = svr_fit(X, y, C, eps);
    REQUIRE(model.converged);
    // Evaluate both solutions at their best intercept: when no support
    // vector is free the fitted b is the mean-residual convention, which
    // deliberately does not minimize the primal. The convention itself is
    // covered by its own test; here we compare the dual solves.
    const double b_ours = best_intercept(X, y, model.w, C, eps);
    const double ours = svr_primal_objective(model.w, b_ours, X, y, C, eps);

    const GridOracle oracle = dual_grid_search(X * X.transpose(), y, C, eps);
    const Eigen::VectorXd w_oracle = X.transpose() * oracle.beta;
    const double b_oracle = best_intercept(X, y, w_oracle, C, eps);
    const double ref = svr_primal_objective(w_oracle, b_oracle, X, y, C, eps);

    CHECK(ours <= ref * (1.0 + 1e-4) + 1e-8);
    // Weak duality: the primal value can never undercut any dual value.
    CHECK(ours >= oracle.dual - 1e-6 * std::max(1.0, std::abs(oracle.dual)));
    CHECK(std::abs(ours - ref) <= 1e-4 * std::max(1.0, std::abs(ref)));
  }
}
