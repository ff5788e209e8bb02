#pragma once

#include <Eigen/Dense>

namespace oscimark {

// Linear epsilon-insensitive SVR:
//   min 1/2 ||w||^2 + C sum_i max(0, |y_i - (w'x_i + b)| - eps)
// solved in the dual by pairwise coordinate ascent under sum(beta) = 0.
struct SvrModel {
  Eigen::VectorXd w;
  double b = 0.0;
  double C = 1.0;
  double eps = 0.1;
  int support_count = 0;
  bool converged = true;
};

struct SvrDualResult {
  Eigen::VectorXd beta;  // dual coefficients in [-C, C]
  double b = 0.0;
  bool converged = true;
  int n_updates = 0;
};

// Kernel-space solver. `skip` freezes one index at beta = 0 (leave-one-out
// without copying the Gram matrix); `warm` seeds the dual variables.
SvrDualResult svr_fit_kernel(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, double C,
                             double eps, const Eigen::VectorXd* warm = nullptr,
                             int skip = -1, double tol = 1e-6, int max_updates = 200000);

SvrModel svr_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double C, double eps);

Eigen::VectorXd svr_predict(const SvrModel& model, const Eigen::MatrixXd& X);

double svr_primal_objective(const Eigen::VectorXd& w, double b, const Eigen::MatrixXd& X,
                            const Eigen::VectorXd& y, double C, double eps);

// Worst KKT violation of a dual iterate (pairwise directional derivative);
// <= tol at convergence.
double svr_kkt_violation(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& beta, double C, double eps, int skip = -1);

}  // namespace oscimark
