#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "oscimark/bands.hpp"
#include "oscimark/recording.hpp"

namespace oscimark {

struct Window {
  Eigen::Index start = 0;
  Eigen::Index length = 0;
};

// Fixed-length windows every step_s seconds; trailing partial window dropped.
std::vector<Window> sliding_windows(const Recording& rec, double len_s = 4.0,
                                    double step_s = 1.0);

// Band-pass (same Butterworth family as preprocessing) followed by the
// discrete analytic signal.
Eigen::VectorXcd analytic_phase(const Eigen::VectorXd& window, const Band& band, double fs);

// Weighted phase lag index over time samples of the analytic cross-signal:
// |mean Im(x conj(y))| / mean |Im(x conj(y))|, with 0/0 defined as 0.
// Input: channels x samples. Output: symmetric, zero diagonal, values in [0,1].
Eigen::MatrixXd wpli_matrix(const Eigen::MatrixXcd& analytic);

// Row-major upper triangle (i<j) embedding used for clustering.
Eigen::VectorXd upper_triangle(const Eigen::MatrixXd& m);

struct StateModel {
  int k = 4;
  Eigen::MatrixXd centroids;  // k x dim
  std::string band;
  std::uint64_t seed = 0;
  std::vector<double> inertia_trace;  // per Lloyd iteration, not persisted
};

// Seeded deterministic k-means (greedy farthest-point init, Lloyd updates,
// empty clusters re-seeded with the worst-fit point).
StateModel cluster_states(const std::vector<Eigen::VectorXd>& points, int k,
                          std::uint64_t seed, const std::string& band = "");

// Nearest-centroid labels (Euclidean; ties break to the lowest index).
std::vector<int> assign_states(const std::vector<Eigen::VectorXd>& points,
                               const StateModel& model);

struct StateMetrics {
  Eigen::VectorXd occupancy;   // fraction of windows per state
  Eigen::VectorXd mean_dwell;  // mean run length (windows), 0 if unvisited
  Eigen::VectorXd transitions; // exits per state
};

StateMetrics state_metrics(const std::vector<int>& labels, int k);

struct StateSequence {
  std::string subject_id;
  std::string band;
  std::vector<int> labels;
  StateMetrics metrics;
};

void save_state_model(const StateModel& model, const std::string& path);
StateModel load_state_model(const std::string& path);

}  // namespace oscimark
