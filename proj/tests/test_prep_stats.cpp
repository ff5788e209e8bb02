// Table preparation (imputation, IQR outlier replacement, z-scoring),
// scoring metrics, rank statistics, and the clinical endpoint arithmetic.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oscimark/errors.hpp"
#include "oscimark/pipeline.hpp"
#include "oscimark/prep.hpp"
#include "oscimark/stats.hpp"
#include "test_util.hpp"

using namespace oscimark;
using namespace testutil;

namespace {

FeatureTable column_table(const std::vector<std::vector<double>>& columns) {
  FeatureTable t;
  const std::size_t rows = columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) t.subject_ids.push_back("s" + std::to_string(r));
  for (std::size_t c = 0; c < columns.size(); ++c)
    t.feature_names.push_back("f" + std::to_string(c));
  t.values.resize(rows, columns.size());
  t.missing.assign(rows, std::vector<bool>(columns.size(), false));
  for (std::size_t c = 0; c < columns.size(); ++c)
    for (std::size_t r = 0; r < rows; ++r) t.values(r, c) = columns[c][r];
  return t;
}

std::vector<int> all_rows(const FeatureTable& t) {
  std::vector<int> rows(t.n_rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
  return rows;
}

}  // namespace

TEST_CASE("quantiles use linear interpolation at position q*(n-1)") {
  CHECK(quantile({1, 2, 3, 4, 100}, 0.25) == doctest::Approx(2.0));
  CHECK(quantile({1, 2, 3, 4, 100}, 0.75) == doctest::Approx(4.0));
  CHECK(quantile({1, 2, 3, 4, 100}, 0.5) == doctest::Approx(3.0));
  CHECK(quantile({1, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile({3, 1, 2}, 0.0) == doctest::Approx(1.0));
  CHECK(quantile({3, 1, 2}, 1.0) == doctest::Approx(3.0));
}

TEST_CASE("prep replaces the IQR outlier in [1,2,3,4,100] with the in-bound mean") {
  const FeatureTable t = column_table({{1, 2, 3, 4, 100}});
  const PrepTransform prep = prep_fit(t, all_rows(t));
  REQUIRE(prep.retained.size() == 1);
  const ColumnPrep& col = prep.columns[0];
  CHECK(col.q1 == doctest::Approx(2.0));
  CHECK(col.q3 == doctest::Approx(4.0));
  CHECK(col.lo_bound == doctest::Approx(-1.0));
  CHECK(col.hi_bound == doctest::Approx(7.0));
  CHECK(col.replace_value == doctest::Approx(2.5));

  // Post-replacement column [1,2,3,4,2.5]: mean 2.5, population std 1.
  const Eigen::MatrixXd out = prep_apply(prep, t, all_rows(t));
  CHECK(out(0, 0) == doctest::Approx(-1.5));
  CHECK(out(1, 0) == doctest::Approx(-0.5));
  CHECK(out(2, 0) == doctest::Approx(0.5));
  CHECK(out(3, 0) == doctest::Approx(1.5));
  CHECK(out(4, 0) == doctest::Approx(0.0));
}

TEST_CASE("constant columns drop at the z-step") {
  const FeatureTable t = column_table({{5, 5, 5, 5}, {1, 2, 3, 4}});
  const PrepTransform prep = prep_fit(t, all_rows(t));
  CHECK(prep.columns[0].dropped);
  CHECK_FALSE(prep.columns[1].dropped);
  REQUIRE(prep.retained.size() == 1);
  CHECK(prep.retained[0] == 1);
  CHECK_FALSE(prep.warnings.empty());
  CHECK(prep_apply(prep, t, all_rows(t)).cols() == 1);
}

TEST_CASE("held-out rows are transformed with training statistics only") {
  FeatureTable t = column_table({{1, 2, 3, 4, 50}});
  t.missing[4][0] = true;
  t.values(4, 0) = std::numeric_limits<double>::quiet_NaN();

  const std::vector<int> train{0, 1, 2, 3};
  const PrepTransform prep = prep_fit(t, train);
  CHECK(prep.columns[0].impute_mean == doctest::Approx(2.5));  // train mean, rows 0-3

  // The held-out missing cell is imputed with the train mean and z-scored
  // with train parameters; changing the held-out cell cannot move them.
  const Eigen::MatrixXd held = prep_apply(prep, t, {4});
  const double z_mean = prep.columns[0].z_mean, z_std = prep.columns[0].z_std;
  CHECK(held(0, 0) == doctest::Approx((2.5 - z_mean) / z_std));

  FeatureTable mutated = t;
  mutated.missing[4][0] = false;
  mutated.values(4, 0) = 1e9;
  const PrepTransform prep2 = prep_fit(mutated, train);
  CHECK(prep2.columns[0].z_mean == prep.columns[0].z_mean);
  CHECK(prep2.columns[0].z_std == prep.columns[0].z_std);
  CHECK(prep2.columns[0].impute_mean == prep.columns[0].impute_mean);
}

TEST_CASE("all-missing columns are dropped with a warning") {
  FeatureTable t = column_table({{0, 0, 0}, {1, 2, 3}});
  for (int r = 0; r < 3; ++r) {
    t.missing[r][0] = true;
    t.values(r, 0) = std::numeric_limits<double>::quiet_NaN();
  }
  const PrepTransform prep = prep_fit(t, all_rows(t));
  CHECK(prep.columns[0].dropped);
  CHECK(prep.retained == std::vector<int>{1});
}

TEST_CASE("score on exact, shifted, and negated predictions") {
  Eigen::VectorXd obs(4);
  obs << -1.0, 0.0, 0.5, 0.5;

  const ScoreResult exact = score(obs, obs);
  CHECK(exact.r.value() == doctest::Approx(1.0));
  CHECK(exact.rmse == 0.0);
  CHECK(exact.mae == 0.0);

  const ScoreResult shifted = score((obs.array() + 0.1).matrix(), obs);
  CHECK(shifted.r.value() == doctest::Approx(1.0));
  CHECK(shifted.rmse == doctest::Approx(0.1));
  CHECK(shifted.mae == doctest::Approx(0.1));

  Eigen::VectorXd centered(4);
  centered << -1.0, -0.5, 0.5, 1.0;  // zero mean
  const ScoreResult negated = score(-centered, centered);
  CHECK(negated.r.value() == doctest::Approx(-1.0));

  const ScoreResult flat = score(Eigen::VectorXd::Zero(4), obs);
  CHECK_FALSE(flat.r.has_value());
  CHECK(flat.rmse > 0.0);  // errors still computed
}

TEST_CASE("midranks average over ties") {
  Eigen::VectorXd v(4);
  v << 10, 20, 20, 30;
  const Eigen::VectorXd r = midranks(v);
  CHECK(r[0] == doctest::Approx(1.0));
  CHECK(r[1] == doctest::Approx(2.5));
  CHECK(r[2] == doctest::Approx(2.5));
  CHECK(r[3] == doctest::Approx(4.0));
}

TEST_CASE("spearman rho endpoints and constant-input error") {
  Eigen::VectorXd up(5), down(5);
  up << 1, 2, 3, 4, 5;
  down << 9, 7, 5, 3, 1;
  CHECK(spearman_rho(up, up) == doctest::Approx(1.0));
  CHECK(spearman_rho(up, down) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(spearman_rho(up, Eigen::VectorXd::Constant(5, 2.0)), Error);
}

TEST_CASE("spearman_perm: perfect monotone association is highly significant") {
  Eigen::VectorXd up(5), down(5);
  up << 1, 2, 3, 4, 5;
  down << 5, 4, 3, 2, 1;
  const auto [rho, p] = spearman_perm(up, up, 999, 7);
  CHECK(rho == doctest::Approx(1.0));
  CHECK(p >= 1.0 / 1000.0);
  CHECK(p < 0.05);

  const auto [rho_d, p_d] = spearman_perm(up, down, 999, 7);
  CHECK(rho_d == doctest::Approx(-1.0));
  CHECK(p_d < 0.05);  // two-sided
}

TEST_CASE("spearman_perm null calibration") {
  int calibrated = 0;
  for (std::uint64_t run = 0; run < 50; ++run) {
    const Eigen::VectorXd a = gaussian_matrix(30, 1, 7000 + run);
    const Eigen::VectorXd b = gaussian_matrix(30, 1, 8000 + run);
    const auto [rho, p] = spearman_perm(a, b, 200, run);
    if (p > 0.05) ++calibrated;
  }
  CHECK(calibrated >= 45);
}

TEST_CASE("endpoint percentage formula") {
  CHECK(endpoint_pct(31, 25) == doctest::Approx(0.25));
  CHECK(endpoint_pct(20, 20) == 0.0);
  CHECK(endpoint_pct(20, 25) < 0.0);  // worsening is representable
  CHECK_THROWS_AS(endpoint_pct(7, 7), Error);
  CHECK_THROWS_AS(endpoint_pct(5, 4), Error);
}

TEST_CASE("responder threshold is strict at 20%") {
  CHECK(classify_responder(0.25));
  CHECK_FALSE(classify_responder(0.20));
  CHECK_FALSE(classify_responder(-0.1));
  CHECK(classify_responder(0.2000001));
}
