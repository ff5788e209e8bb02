#pragma once

#include <Eigen/Dense>
#include <optional>

namespace oscimark {

// Pearson r; empty when either vector is constant.
std::optional<double> pearson_r(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct ScoreResult {
  std::optional<double> r;
  double rmse = 0.0;
  double mae = 0.0;
};

ScoreResult score(const Eigen::VectorXd& pred, const Eigen::VectorXd& obs);

// Average ranks (midranks for ties), 1-based.
Eigen::VectorXd midranks(const Eigen::VectorXd& v);

// Spearman rho via midranks; throws on constant input.
double spearman_rho(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Linear-interpolation quantile (position q*(n-1) on the sorted sample).
double quantile(std::vector<double> values, double q);

}  // namespace oscimark
