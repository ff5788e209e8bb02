#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oscimark/elastic_net.hpp"
#include "oscimark/feature_table.hpp"
#include "oscimark/prep.hpp"

namespace oscimark {

struct PipelineConfig {
  ElasticNetConfig enet;                 // stability-selection solver settings
  double select_loocv_majority = 0.5;    // "selected in a fold" = nonzero in > this fraction
  int select_min_folds = 3;
  int n_select_folds = 5;
  int n_outer_folds = 5;
  std::vector<double> svr_c_grid;        // empty -> default 6 log points 1e-2..1e3
  std::vector<double> svr_eps_grid;      // empty -> default 10 linear points 0.01..1.0
  double svr_tol = 1e-6;
  int svr_max_updates = 200000;
  int workers = 1;
  int min_fold_r_size = 3;               // folds smaller than this get no r

  std::vector<double> c_grid() const;
  std::vector<double> eps_grid() const;
};

// ---- endpoint math ----

// (t0 - t1) / (t0 - 7); baseline must exceed the scale floor of 7.
double endpoint_pct(double t0, double t1);
bool classify_responder(double pct);

// ---- cross-validation machinery ----

// Seeded uniform shuffle then contiguous split; sizes differ by at most 1.
std::vector<std::vector<int>> kfold_split(int n, int k, std::uint64_t seed);

// Elastic-net stability selection: 5-fold split, per-fold LOOCV refits,
// majority rule within folds, >= min_folds folds overall. Returns column
// indices in input order; throws EmptySelection when nothing survives.
std::vector<int> stability_select(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const PipelineConfig& cfg, std::uint64_t seed);

struct StepwiseResult {
  std::vector<int> features;      // chosen prefix, in insertion order
  double inner_r = -1.0;          // LOOCV r of the chosen prefix
  double c = 1.0, eps = 0.1;      // grid winner for the chosen prefix
  std::vector<double> trace;      // best inner r after each step
};

// Greedy forward selection scored by inner-LOOCV Pearson r with (C, eps)
// grid search per candidate; stops at non-positive marginal gain.
StepwiseResult stepwise_svr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            const PipelineConfig& cfg);

struct FoldModel {
  std::vector<int> test_rows;
  std::optional<double> r;
  double rmse = 0.0, mae = 0.0;
  std::vector<std::string> selected_features;  // post-stepwise names
  double c = 1.0, eps = 0.1;
  PrepTransform prep;
  Eigen::VectorXd w;  // over selected features, prepped space
  double b = 0.0;
  Eigen::VectorXd predictions;  // aligned with test_rows
};

struct CvReport {
  std::vector<FoldModel> folds;
  std::optional<double> fold_mean_r;  // headline metric
  std::optional<double> pooled_r;
  double pooled_rmse = 0.0, pooled_mae = 0.0;
  std::vector<std::string> subject_ids;
  Eigen::VectorXd observed;   // original row order
  Eigen::VectorXd predicted;  // out-of-fold predictions, original row order
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

CvReport nested_cv(const FeatureTable& table, const Eigen::VectorXd& y,
                   const PipelineConfig& cfg, std::uint64_t seed);

struct PermutationResult {
  double observed = 0.0;
  std::vector<double> null_values;
  double p = 1.0;
  std::uint64_t seed = 0;
};

// Shuffle the outcome and re-run the whole nested CV per replicate;
// add-one p-value.
PermutationResult permutation_test(const FeatureTable& table, const Eigen::VectorXd& y,
                                   const PipelineConfig& cfg, int n_perm,
                                   std::uint64_t master_seed);

// Permutation-based Spearman rank correlation, two-sided.
std::pair<double, double> spearman_perm(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                        int n_perm, std::uint64_t seed);

// Full-cohort fit (prep -> stability -> stepwise -> refit); the persistable
// model a later `predict` applies to new feature tables.
struct TrainedModel {
  PrepTransform prep;
  std::vector<int> prepped_columns;            // indices into prep.retained
  std::vector<std::string> selected_features;  // names, insertion order
  Eigen::VectorXd w;
  double b = 0.0;
  double c = 1.0, eps = 0.1;
  std::uint64_t seed = 0;
  std::string spec_hash;
};

TrainedModel fit_full_model(const FeatureTable& table, const Eigen::VectorXd& y,
                            const PipelineConfig& cfg, std::uint64_t seed);

Eigen::VectorXd apply_model(const TrainedModel& model, const FeatureTable& table);

}  // namespace oscimark
