#include "oscimark/prep.hpp"

#include <cmath>

#include "oscimark/errors.hpp"
#include "oscimark/stats.hpp"

namespace oscimark {

PrepTransform prep_fit(const FeatureTable& table, const std::vector<int>& rows) {
  if (rows.size() < 2)
    throw Error(ErrorKind::Parameter, "prep_fit needs at least 2 rows");
  table.validate();

  PrepTransform t;
  t.columns.resize(table.n_cols());
  for (std::size_t c = 0; c < table.n_cols(); ++c) {
    ColumnPrep& col = t.columns[c];

    std::vector<double> observed;
    for (int r : rows)
      if (!table.missing[r][c]) observed.push_back(table.values(r, c));
    if (observed.empty()) {
      col.dropped = true;
      t.warnings.push_back("column '" + table.feature_names[c] + "' dropped: all missing");
      continue;
    }
    double sum = 0.0;
    for (double v : observed) sum += v;
    col.impute_mean = sum / observed.size();

    // quantiles over the imputed column
    std::vector<double> imputed;
    imputed.reserve(rows.size());
    for (int r : rows)
      imputed.push_back(table.missing[r][c] ? col.impute_mean : table.values(r, c));
    col.q1 = quantile(imputed, 0.25);
    col.q3 = quantile(imputed, 0.75);
    double iqr = col.q3 - col.q1;
    col.lo_bound = col.q1 - 1.5 * iqr;
    col.hi_bound = col.q3 + 1.5 * iqr;

    double in_sum = 0.0;
    int in_cnt = 0;
    for (double v : observed)
      if (v >= col.lo_bound && v <= col.hi_bound) {
        in_sum += v;
        ++in_cnt;
      }
    col.replace_value = in_cnt ? in_sum / in_cnt : col.impute_mean;

    double zsum = 0.0;
    for (double& v : imputed) {
      if (v < col.lo_bound || v > col.hi_bound) v = col.replace_value;
      zsum += v;
    }
    col.z_mean = zsum / imputed.size();
    double var = 0.0;
    for (double v : imputed) var += (v - col.z_mean) * (v - col.z_mean);
    var /= imputed.size();
    if (var <= 0.0) {
      col.dropped = true;
      t.warnings.push_back("column '" + table.feature_names[c] +
                           "' dropped: zero variance after outlier replacement");
      continue;
    }
    col.z_std = std::sqrt(var);
  }

  for (std::size_t c = 0; c < t.columns.size(); ++c)
    if (!t.columns[c].dropped) t.retained.push_back(static_cast<int>(c));
  return t;
}

Eigen::MatrixXd prep_apply(const PrepTransform& t, const FeatureTable& table,
                           const std::vector<int>& rows) {
  if (t.columns.size() != table.n_cols())
    throw Error(ErrorKind::Parameter, "prep transform column count mismatch");
  Eigen::MatrixXd out(rows.size(), t.retained.size());
  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    int r = rows[ri];
    for (std::size_t ci = 0; ci < t.retained.size(); ++ci) {
      const ColumnPrep& col = t.columns[t.retained[ci]];
      double v = table.missing[r][t.retained[ci]] ? col.impute_mean
                                                  : table.values(r, t.retained[ci]);
      if (v < col.lo_bound || v > col.hi_bound) v = col.replace_value;
      out(ri, ci) = (v - col.z_mean) / col.z_std;
    }
  }
  return out;
}

}  // namespace oscimark
