#include <cmath>

#include "oscimark/dynfc.hpp"
#include "oscimark/errors.hpp"

namespace oscimark {

Eigen::MatrixXd wpli_matrix(const Eigen::MatrixXcd& analytic) {
  const Eigen::Index n_ch = analytic.rows();
  const Eigen::Index n_t = analytic.cols();
  if (n_ch < 2 || n_t < 2)
    throw Error(ErrorKind::Parameter, "wPLI needs at least 2 channels and 2 samples");
  if (!analytic.allFinite())
    throw Error(ErrorKind::Data, "non-finite analytic signal in wPLI");

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_ch, n_ch);
  for (Eigen::Index i = 0; i < n_ch; ++i) {
    for (Eigen::Index j = i + 1; j < n_ch; ++j) {
      double sum_im = 0.0, sum_abs = 0.0;
      for (Eigen::Index t = 0; t < n_t; ++t) {
        double im = (analytic(i, t) * std::conj(analytic(j, t))).imag();
        sum_im += im;
        sum_abs += std::abs(im);
      }
      double v = (sum_abs > 0.0) ? std::abs(sum_im) / sum_abs : 0.0;
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Eigen::VectorXd upper_triangle(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXd v(n * (n - 1) / 2);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) v[idx++] = m(i, j);
  return v;
}

}  // namespace oscimark
