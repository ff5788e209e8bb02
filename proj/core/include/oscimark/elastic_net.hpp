#pragma once

#include <Eigen/Dense>
#include <vector>

namespace oscimark {

// Penalized least squares, no sample-size normalization:
//   sum_i (y_i - x_i beta)^2 + alpha * [(1-lambda) ||beta||_2^2 + lambda ||beta||_1]
// Callers pre-standardize columns and pre-center y.
struct ElasticNetConfig {
  double alpha = 0.01;
  double lambda = 0.8;     // L1 mixing in [0,1]
  double tol = 1e-7;       // relative coefficient-change stop
  int max_iter = 10000;    // full sweeps
  bool scale_by_n = false; // 1/(2n) residual scaling for comparison runs
  bool track_objective = false;
};

struct ElasticNetResult {
  Eigen::VectorXd beta;
  bool converged = false;
  int n_sweeps = 0;
  std::vector<double> objective_trace;  // filled when track_objective
};

ElasticNetResult elastic_net_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                 const ElasticNetConfig& cfg,
                                 const Eigen::VectorXd* warm_start = nullptr);

double elastic_net_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& beta, const ElasticNetConfig& cfg);

}  // namespace oscimark
