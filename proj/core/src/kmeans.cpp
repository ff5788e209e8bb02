#include <cmath>
#include <limits>
#include <sstream>

#include "oscimark/csv.hpp"
#include "oscimark/dynfc.hpp"
#include "oscimark/errors.hpp"
#include "oscimark/rng.hpp"

namespace oscimark {

namespace {

double sqdist(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).squaredNorm();
}

// Nearest centroid, ties to the lowest index.
int nearest(const Eigen::VectorXd& p, const Eigen::MatrixXd& centroids) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < centroids.rows(); ++c) {
    double d = (p - centroids.row(c).transpose()).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

}  // namespace

StateModel cluster_states(const std::vector<Eigen::VectorXd>& points, int k,
                          std::uint64_t seed, const std::string& band) {
  if (k < 2) throw Error(ErrorKind::Parameter, "cluster count must be >= 2");
  const int n = static_cast<int>(points.size());
  if (n < k)
    throw Error(ErrorKind::Parameter, "fewer matrices (" + std::to_string(n) +
                                          ") than clusters (" + std::to_string(k) + ")");
  const Eigen::Index dim = points[0].size();
  for (const auto& p : points)
    if (p.size() != dim)
      throw Error(ErrorKind::Parameter, "inconsistent point dimensions in clustering");

  StateModel model;
  model.k = k;
  model.band = band;
  model.seed = seed;
  model.centroids.resize(k, dim);

  // greedy farthest-point init from a seeded start
  auto rng = make_rng(seed);
  int first = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
  model.centroids.row(0) = points[first].transpose();
  std::vector<double> min_d(n);
  for (int i = 0; i < n; ++i) min_d[i] = sqdist(points[i], points[first]);
  for (int c = 1; c < k; ++c) {
    int far = 0;
    for (int i = 1; i < n; ++i)
      if (min_d[i] > min_d[far]) far = i;
    model.centroids.row(c) = points[far].transpose();
    for (int i = 0; i < n; ++i)
      min_d[i] = std::min(min_d[i], sqdist(points[i], points[far]));
  }

  std::vector<int> labels(n, 0);
  const int max_iter = 300;
  const double rel_tol = 1e-6;
  double prev_inertia = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iter; ++iter) {
    double inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      labels[i] = nearest(points[i], model.centroids);
      inertia += (points[i] - model.centroids.row(labels[i]).transpose()).squaredNorm();
    }
    model.inertia_trace.push_back(inertia);

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, dim);
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(labels[i]) += points[i].transpose();
      ++counts[labels[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        model.centroids.row(c) = sums.row(c) / counts[c];
      } else {
        // re-seed with the point farthest from its assigned centroid
        int worst = 0;
        double worst_d = -1.0;
        for (int i = 0; i < n; ++i) {
          double d = (points[i] - model.centroids.row(labels[i]).transpose()).squaredNorm();
          if (d > worst_d) {
            worst_d = d;
            worst = i;
          }
        }
        model.centroids.row(c) = points[worst].transpose();
      }
    }

    if (std::isfinite(prev_inertia)) {
      double denom = std::max(prev_inertia, 1e-300);
      if (std::abs(prev_inertia - inertia) / denom <= rel_tol) break;
    }
    prev_inertia = inertia;
  }
  return model;
}

std::vector<int> assign_states(const std::vector<Eigen::VectorXd>& points,
                               const StateModel& model) {
  std::vector<int> labels(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != model.centroids.cols())
      throw Error(ErrorKind::Parameter, "point dimension does not match state model");
    labels[i] = nearest(points[i], model.centroids);
  }
  return labels;
}

StateMetrics state_metrics(const std::vector<int>& labels, int k) {
  if (labels.empty()) throw Error(ErrorKind::Parameter, "empty state sequence");
  for (int l : labels)
    if (l < 0 || l >= k)
      throw Error(ErrorKind::Parameter, "state label out of range");

  StateMetrics m;
  m.occupancy = Eigen::VectorXd::Zero(k);
  m.mean_dwell = Eigen::VectorXd::Zero(k);
  m.transitions = Eigen::VectorXd::Zero(k);

  Eigen::VectorXd run_count = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd run_total = Eigen::VectorXd::Zero(k);

  std::size_t i = 0;
  while (i < labels.size()) {
    std::size_t j = i;
    while (j < labels.size() && labels[j] == labels[i]) ++j;
    int s = labels[i];
    run_count[s] += 1.0;
    run_total[s] += static_cast<double>(j - i);
    if (j < labels.size()) m.transitions[s] += 1.0;  // run exits into another state
    i = j;
  }
  for (int s = 0; s < k; ++s) {
    if (run_count[s] > 0) m.mean_dwell[s] = run_total[s] / run_count[s];
    m.occupancy[s] = run_total[s] / static_cast<double>(labels.size());
  }
  return m;
}

void save_state_model(const StateModel& model, const std::string& path) {
  std::ostringstream out;
  out << "spec_version=1\n";
  out << "k=" << model.k << "\n";
  out << "band=" << model.band << "\n";
  out << "seed=" << model.seed << "\n";
  out << "dim=" << model.centroids.cols() << "\n";
  for (int c = 0; c < model.k; ++c) {
    out << "centroid" << c << "=";
    for (Eigen::Index d = 0; d < model.centroids.cols(); ++d) {
      if (d) out << ' ';
      out << format_double(model.centroids(c, d));
    }
    out << "\n";
  }
  write_text_file(path, out.str());
}

StateModel load_state_model(const std::string& path) {
  StateModel model;
  Eigen::Index dim = 0;
  std::vector<std::pair<int, std::string>> rows;
  for (const auto& [k, v] : read_kv(path)) {
    if (k == "k")
      model.k = static_cast<int>(parse_double(v, path));
    else if (k == "band")
      model.band = v;
    else if (k == "seed")
      model.seed = static_cast<std::uint64_t>(std::stoull(v));
    else if (k == "dim")
      dim = static_cast<Eigen::Index>(parse_double(v, path));
    else if (k.rfind("centroid", 0) == 0)
      rows.emplace_back(std::stoi(k.substr(8)), v);
  }
  if (model.k < 2 || dim <= 0 || static_cast<int>(rows.size()) != model.k)
    throw Error(ErrorKind::Schema, "malformed state model file: " + path);
  model.centroids.resize(model.k, dim);
  for (const auto& [c, line] : rows) {
    std::istringstream ss(line);
    for (Eigen::Index d = 0; d < dim; ++d) {
      std::string tok;
      if (!(ss >> tok))
        throw Error(ErrorKind::Schema, "short centroid row in " + path);
      model.centroids(c, d) = parse_double(tok, path);
    }
  }
  return model;
}

}  // namespace oscimark
