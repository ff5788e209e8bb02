#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "oscimark/features.hpp"

namespace oscimark {

// Stacked cohort design matrix with a missing-value mask. Serialized as CSV
// with a subject_id column and one column per feature name; missing cells
// are empty fields.
struct FeatureTable {
  std::vector<std::string> subject_ids;
  std::vector<std::string> feature_names;
  Eigen::MatrixXd values;                  // rows x features; missing cells are NaN
  std::vector<std::vector<bool>> missing;  // same shape

  std::size_t n_rows() const { return subject_ids.size(); }
  std::size_t n_cols() const { return feature_names.size(); }

  void validate() const;
};

void write_table(const FeatureTable& table, const std::string& path);

// `expected_names`, when non-empty, enforces an exact header match.
FeatureTable read_table(const std::string& path,
                        const std::vector<std::string>& expected_names = {});

}  // namespace oscimark
