#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "oscimark/feature_table.hpp"

namespace oscimark {

// Column-wise train-set statistics: imputation mean, IQR outlier bounds and
// replacement value, and z-score parameters. Fitted on a row subset only;
// applying to held-out rows uses nothing but these parameters.
struct ColumnPrep {
  double impute_mean = 0.0;
  double q1 = 0.0, q3 = 0.0;
  double lo_bound = 0.0, hi_bound = 0.0;
  double replace_value = 0.0;
  double z_mean = 0.0, z_std = 1.0;
  bool dropped = false;
};

struct PrepTransform {
  std::vector<ColumnPrep> columns;   // one per original column
  std::vector<int> retained;         // original column indices kept
  std::vector<std::string> warnings; // dropped-column records
};

PrepTransform prep_fit(const FeatureTable& table, const std::vector<int>& rows);

// Impute -> outlier-replace -> z-score; returns rows x retained-columns.
Eigen::MatrixXd prep_apply(const PrepTransform& t, const FeatureTable& table,
                           const std::vector<int>& rows);

}  // namespace oscimark
