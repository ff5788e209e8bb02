#include "oscimark/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "oscimark/errors.hpp"

namespace oscimark {

std::optional<double> pearson_r(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() < 2) return std::nullopt;
  const double ma = a.mean(), mb = b.mean();
  Eigen::VectorXd da = a.array() - ma;
  Eigen::VectorXd db = b.array() - mb;
  double va = da.squaredNorm(), vb = db.squaredNorm();
  if (va <= 0.0 || vb <= 0.0) return std::nullopt;
  return da.dot(db) / std::sqrt(va * vb);
}

ScoreResult score(const Eigen::VectorXd& pred, const Eigen::VectorXd& obs) {
  if (pred.size() != obs.size() || pred.size() == 0)
    throw Error(ErrorKind::Parameter, "score inputs must be equal-length and non-empty");
  ScoreResult res;
  Eigen::VectorXd err = pred - obs;
  res.rmse = std::sqrt(err.squaredNorm() / err.size());
  res.mae = err.cwiseAbs().mean();
  res.r = pearson_r(pred, obs);
  return res;
}

Eigen::VectorXd midranks(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return v[a] < v[b]; });
  Eigen::VectorXd ranks(n);
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j < n && v[order[j]] == v[order[i]]) ++j;
    double rank = 0.5 * static_cast<double>(i + j - 1) + 1.0;  // average of 1-based ranks
    for (Eigen::Index k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double spearman_rho(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() < 3)
    throw Error(ErrorKind::Parameter, "spearman needs equal lengths >= 3");
  auto r = pearson_r(midranks(a), midranks(b));
  if (!r)
    throw Error(ErrorKind::Computation, "spearman correlation undefined for constant input");
  return *r;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorKind::Parameter, "quantile of empty sample");
  std::sort(values.begin(), values.end());
  double pos = q * static_cast<double>(values.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
  double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

}  // namespace oscimark
