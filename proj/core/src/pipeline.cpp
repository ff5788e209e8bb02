#include "oscimark/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oscimark/errors.hpp"
#include "oscimark/parallel.hpp"
#include "oscimark/rng.hpp"
#include "oscimark/stats.hpp"
#include "oscimark/svr.hpp"

namespace oscimark {

std::vector<double> PipelineConfig::c_grid() const {
  if (!svr_c_grid.empty()) return svr_c_grid;
  std::vector<double> g;
  for (int i = 0; i < 6; ++i) g.push_back(std::pow(10.0, -2.0 + i));
  return g;
}

std::vector<double> PipelineConfig::eps_grid() const {
  if (!svr_eps_grid.empty()) return svr_eps_grid;
  std::vector<double> g;
  for (int i = 0; i < 10; ++i) g.push_back(0.01 + i * (1.0 - 0.01) / 9.0);
  return g;
}

double endpoint_pct(double t0, double t1) {
  if (!(t0 > 7.0))
    throw Error(ErrorKind::Parameter,
                "degenerate baseline: PANSS-FSNS T0 must exceed the scale floor of 7");
  if (!(t1 >= 7.0))
    throw Error(ErrorKind::Parameter, "PANSS-FSNS T1 below the scale floor of 7");
  return (t0 - t1) / (t0 - 7.0);
}

bool classify_responder(double pct) {
  if (!std::isfinite(pct))
    throw Error(ErrorKind::Parameter, "non-finite endpoint value");
  return pct > 0.20;
}

std::vector<std::vector<int>> kfold_split(int n, int k, std::uint64_t seed) {
  if (k < 2 || n < k)
    throw Error(ErrorKind::Parameter, "k-fold split needs n >= k >= 2");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(seed);
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<std::vector<int>> folds(k);
  int base = n / k, extra = n % k;
  int pos = 0;
  for (int f = 0; f < k; ++f) {
    int size = base + (f < extra ? 1 : 0);
    folds[f].assign(order.begin() + pos, order.begin() + pos + size);
    std::sort(folds[f].begin(), folds[f].end());
    pos += size;
  }
  return folds;
}

namespace {

Eigen::VectorXd center(const Eigen::VectorXd& v) {
  return v.array() - v.mean();
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<int>& rows) {
  Eigen::MatrixXd out(rows.size(), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = X.row(rows[i]);
  return out;
}

Eigen::VectorXd take(const Eigen::VectorXd& v, const std::vector<int>& rows) {
  Eigen::VectorXd out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = v[rows[i]];
  return out;
}

}  // namespace

std::vector<int> stability_select(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const PipelineConfig& cfg, std::uint64_t seed) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  if (n < 10)
    throw Error(ErrorKind::InsufficientData, "stability selection needs n >= 10");

  auto folds = kfold_split(n, cfg.n_select_folds, seed);
  std::vector<int> fold_votes(p, 0);

  for (int f = 0; f < cfg.n_select_folds; ++f) {
    std::vector<int> train;
    for (int g = 0; g < cfg.n_select_folds; ++g)
      if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
    std::sort(train.begin(), train.end());

    Eigen::MatrixXd Xt = take_rows(X, train);
    Eigen::VectorXd yt = take(y, train);

    std::vector<int> nonzero_counts(p, 0);
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(p);
    const int m = static_cast<int>(train.size());
    for (int left_out = 0; left_out < m; ++left_out) {
      std::vector<int> keep;
      keep.reserve(m - 1);
      for (int i = 0; i < m; ++i)
        if (i != left_out) keep.push_back(i);
      Eigen::MatrixXd Xf = take_rows(Xt, keep);
      Eigen::VectorXd yf = center(take(yt, keep));
      auto fit = elastic_net_fit(Xf, yf, cfg.enet, &warm);
      warm = fit.beta;
      for (int j = 0; j < p; ++j)
        if (std::abs(fit.beta[j]) > 1e-10) ++nonzero_counts[j];
    }
    for (int j = 0; j < p; ++j)
      if (nonzero_counts[j] > cfg.select_loocv_majority * m) ++fold_votes[j];
  }

  std::vector<int> retained;
  for (int j = 0; j < p; ++j)
    if (fold_votes[j] >= cfg.select_min_folds) retained.push_back(j);
  if (retained.empty())
    throw Error(ErrorKind::EmptySelection,
                "stability selection retained no features (outcome may carry no signal)");
  return retained;
}

namespace {

// LOOCV predictions for one feature set at one grid point; kernel-space,
// warm-started per left-out index from the full fit.
std::optional<double> loocv_r(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, double c,
                              double eps, const PipelineConfig& cfg,
                              Eigen::VectorXd* warm_io) {
  const int n = static_cast<int>(y.size());
  SvrDualResult full = svr_fit_kernel(K, y, c, eps, warm_io, -1, cfg.svr_tol,
                                      cfg.svr_max_updates);
  if (warm_io) *warm_io = full.beta;
  Eigen::VectorXd full_fit = (K * full.beta).array() + full.b;
  Eigen::VectorXd pred(n);
  for (int i = 0; i < n; ++i) {
    // a point with zero dual weight strictly inside the tube is inactive:
    // dropping it leaves the fit unchanged, so its refit can be skipped
    if (full.converged && full.beta[i] == 0.0 &&
        std::abs(y[i] - full_fit[i]) < eps * (1.0 - 1e-9)) {
      pred[i] = full_fit[i];
      continue;
    }
    SvrDualResult fit = svr_fit_kernel(K, y, c, eps, &full.beta, i, cfg.svr_tol,
                                       cfg.svr_max_updates);
    pred[i] = fit.beta.dot(K.col(i)) + fit.b;
  }
  auto r = pearson_r(pred, y);
  return r;
}

}  // namespace

StepwiseResult stepwise_svr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            const PipelineConfig& cfg) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  if (p < 1)
    throw Error(ErrorKind::Parameter, "stepwise selection needs at least one candidate");

  const auto c_grid = cfg.c_grid();
  const auto eps_grid = cfg.eps_grid();

  std::vector<int> included;
  std::vector<bool> in_model(p, false);
  StepwiseResult best_prefix;
  double current_r = -std::numeric_limits<double>::infinity();

  StepwiseResult result;
  Eigen::MatrixXd K_included = Eigen::MatrixXd::Zero(n, n);  // gram of included set

  while (static_cast<int>(included.size()) < p) {
    int best_feature = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    double best_c = c_grid.front(), best_eps = eps_grid.front();

    for (int cand = 0; cand < p; ++cand) {
      if (in_model[cand]) continue;
      // gram of included + candidate
      Eigen::VectorXd col = X.col(cand);
      Eigen::MatrixXd K = K_included + col * col.transpose();

      double cand_score = -1.0;
      double cand_c = c_grid.front(), cand_eps = eps_grid.front();
      for (double c : c_grid) {
        Eigen::VectorXd warm = Eigen::VectorXd::Zero(n);
        for (double eps : eps_grid) {
          auto r = loocv_r(K, y, c, eps, cfg, &warm);
          double score = r ? *r : -1.0;  // constant predictions score -1
          if (score > cand_score) {
            cand_score = score;
            cand_c = c;
            cand_eps = eps;
          }
        }
      }
      if (cand_score > best_score) {
        best_score = cand_score;
        best_feature = cand;
        best_c = cand_c;
        best_eps = cand_eps;
      }
    }

    if (best_feature < 0) break;
    double marginal = best_score - (included.empty() ? -std::numeric_limits<double>::infinity()
                                                     : current_r);
    if (!included.empty() && marginal <= 0.0) break;

    included.push_back(best_feature);
    in_model[best_feature] = true;
    Eigen::VectorXd col = X.col(best_feature);
    K_included += col * col.transpose();
    current_r = best_score;
    result.trace.push_back(best_score);

    if (result.trace.size() == 1 || best_score > best_prefix.inner_r) {
      best_prefix.features = included;
      best_prefix.inner_r = best_score;
      best_prefix.c = best_c;
      best_prefix.eps = best_eps;
    }
  }

  if (best_prefix.features.empty())
    throw Error(ErrorKind::Computation, "stepwise selection produced no model");
  best_prefix.trace = result.trace;
  return best_prefix;
}

CvReport nested_cv(const FeatureTable& table, const Eigen::VectorXd& y,
                   const PipelineConfig& cfg, std::uint64_t seed) {
  const int n = static_cast<int>(table.n_rows());
  if (n < 10) throw Error(ErrorKind::InsufficientData, "nested CV needs n >= 10");
  if (y.size() != n) throw Error(ErrorKind::Parameter, "outcome length mismatch");

  auto folds = kfold_split(n, cfg.n_outer_folds, child_seed(seed, 1));

  CvReport report;
  report.seed = seed;
  report.subject_ids = table.subject_ids;
  report.observed = y;
  report.predicted = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  report.folds.resize(cfg.n_outer_folds);

  std::vector<std::vector<std::string>> fold_warnings(cfg.n_outer_folds);

  parallel_for(cfg.n_outer_folds, cfg.workers, [&](int f) {
    const auto& test = folds[f];
    std::vector<int> train;
    for (int g = 0; g < cfg.n_outer_folds; ++g)
      if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
    std::sort(train.begin(), train.end());

    FoldModel fold;
    fold.test_rows = test;
    fold.prep = prep_fit(table, train);
    Eigen::MatrixXd Xtr = prep_apply(fold.prep, table, train);
    Eigen::MatrixXd Xte = prep_apply(fold.prep, table, test);
    Eigen::VectorXd ytr = take(y, train);
    Eigen::VectorXd yte = take(y, test);

    auto selected = stability_select(Xtr, ytr, cfg, child_seed(seed, 100 + f));
    Eigen::MatrixXd Xsel(Xtr.rows(), selected.size());
    for (std::size_t j = 0; j < selected.size(); ++j) Xsel.col(j) = Xtr.col(selected[j]);

    auto step = stepwise_svr(Xsel, ytr, cfg);

    Eigen::MatrixXd Xfit(Xtr.rows(), step.features.size());
    Eigen::MatrixXd Xpred(Xte.rows(), step.features.size());
    for (std::size_t j = 0; j < step.features.size(); ++j) {
      int col = selected[step.features[j]];
      Xfit.col(j) = Xtr.col(col);
      Xpred.col(j) = Xte.col(col);
      fold.selected_features.push_back(table.feature_names[fold.prep.retained[col]]);
    }
    SvrModel model = svr_fit(Xfit, ytr, step.c, step.eps);
    fold.w = model.w;
    fold.b = model.b;
    fold.c = step.c;
    fold.eps = step.eps;
    fold.predictions = svr_predict(model, Xpred);

    auto sc = score(fold.predictions, yte);
    fold.rmse = sc.rmse;
    fold.mae = sc.mae;
    if (static_cast<int>(test.size()) >= cfg.min_fold_r_size && sc.r) {
      fold.r = sc.r;
    } else {
      fold.r = std::nullopt;
      fold_warnings[f].push_back("fold " + std::to_string(f) +
                                 ": r not computed (fold too small or constant predictions)");
    }
    report.folds[f] = std::move(fold);
  });

  double r_sum = 0.0;
  int r_cnt = 0;
  for (int f = 0; f < cfg.n_outer_folds; ++f) {
    const auto& fold = report.folds[f];
    for (std::size_t i = 0; i < fold.test_rows.size(); ++i)
      report.predicted[fold.test_rows[i]] = fold.predictions[i];
    if (fold.r) {
      r_sum += *fold.r;
      ++r_cnt;
    }
    for (auto& w : fold_warnings[f]) report.warnings.push_back(std::move(w));
  }
  if (r_cnt > 0) report.fold_mean_r = r_sum / r_cnt;
  auto pooled = score(report.predicted, report.observed);
  report.pooled_r = pooled.r;
  report.pooled_rmse = pooled.rmse;
  report.pooled_mae = pooled.mae;
  return report;
}

PermutationResult permutation_test(const FeatureTable& table, const Eigen::VectorXd& y,
                                   const PipelineConfig& cfg, int n_perm,
                                   std::uint64_t master_seed) {
  if (n_perm < 1) throw Error(ErrorKind::Parameter, "n_perm must be >= 1");

  CvReport observed_report = nested_cv(table, y, cfg, master_seed);
  if (!observed_report.fold_mean_r)
    throw Error(ErrorKind::Computation, "observed fold-averaged r is undefined");

  PermutationResult res;
  res.seed = master_seed;
  res.observed = *observed_report.fold_mean_r;
  res.null_values.assign(n_perm, 0.0);

  const int n = static_cast<int>(y.size());
  PipelineConfig inner_cfg = cfg;
  inner_cfg.workers = 1;  // parallelism lives at the replicate level

  parallel_for(n_perm, cfg.workers, [&](int i) {
    std::uint64_t cs = child_seed(master_seed, 1000 + static_cast<std::uint64_t>(i));
    auto rng = make_rng(cs);
    Eigen::VectorXd yp = y;
    for (int k = n - 1; k > 0; --k) {
      int j = static_cast<int>(rng() % static_cast<std::uint64_t>(k + 1));
      std::swap(yp[k], yp[j]);
    }
    double r = 0.0;
    try {
      CvReport rep = nested_cv(table, yp, inner_cfg, cs);
      if (rep.fold_mean_r) r = *rep.fold_mean_r;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::EmptySelection) throw;
      // a null replicate with no selectable features carries no signal
      r = 0.0;
    }
    res.null_values[i] = r;
  });

  int count = 0;
  for (double v : res.null_values)
    if (v >= res.observed) ++count;
  res.p = (1.0 + count) / (n_perm + 1.0);
  return res;
}

std::pair<double, double> spearman_perm(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                        int n_perm, std::uint64_t seed) {
  if (a.size() != b.size() || a.size() < 3)
    throw Error(ErrorKind::Parameter, "spearman_perm needs equal lengths >= 3");
  const int n = static_cast<int>(a.size());
  double rho = spearman_rho(a, b);

  Eigen::VectorXd ra = midranks(a), rb = midranks(b);
  Eigen::VectorXd na = ra.array() - ra.mean();
  na /= na.norm();
  Eigen::VectorXd nb = rb.array() - rb.mean();
  nb /= nb.norm();

  auto rng = make_rng(seed);
  int count = 0;
  Eigen::VectorXd perm = nb;
  for (int it = 0; it < n_perm; ++it) {
    for (int k = n - 1; k > 0; --k) {
      int j = static_cast<int>(rng() % static_cast<std::uint64_t>(k + 1));
      std::swap(perm[k], perm[j]);
    }
    double r = na.dot(perm);
    if (std::abs(r) >= std::abs(rho)) ++count;
  }
  double p = (1.0 + count) / (n_perm + 1.0);
  return {rho, p};
}

TrainedModel fit_full_model(const FeatureTable& table, const Eigen::VectorXd& y,
                            const PipelineConfig& cfg, std::uint64_t seed) {
  const int n = static_cast<int>(table.n_rows());
  if (y.size() != n) throw Error(ErrorKind::Parameter, "outcome length mismatch");
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);

  TrainedModel model;
  model.seed = seed;
  model.prep = prep_fit(table, all);
  Eigen::MatrixXd X = prep_apply(model.prep, table, all);

  auto selected = stability_select(X, y, cfg, child_seed(seed, 7));
  Eigen::MatrixXd Xsel(X.rows(), selected.size());
  for (std::size_t j = 0; j < selected.size(); ++j) Xsel.col(j) = X.col(selected[j]);

  auto step = stepwise_svr(Xsel, y, cfg);
  Eigen::MatrixXd Xfit(X.rows(), step.features.size());
  for (std::size_t j = 0; j < step.features.size(); ++j) {
    int col = selected[step.features[j]];
    Xfit.col(j) = X.col(col);
    model.prepped_columns.push_back(col);
    model.selected_features.push_back(table.feature_names[model.prep.retained[col]]);
  }
  SvrModel svr = svr_fit(Xfit, y, step.c, step.eps);
  model.w = svr.w;
  model.b = svr.b;
  model.c = step.c;
  model.eps = step.eps;
  return model;
}

Eigen::VectorXd apply_model(const TrainedModel& model, const FeatureTable& table) {
  std::vector<int> all(table.n_rows());
  std::iota(all.begin(), all.end(), 0);
  Eigen::MatrixXd X = prep_apply(model.prep, table, all);
  Eigen::MatrixXd Xsel(X.rows(), model.prepped_columns.size());
  for (std::size_t j = 0; j < model.prepped_columns.size(); ++j)
    Xsel.col(j) = X.col(model.prepped_columns[j]);
  return (Xsel * model.w).array() + model.b;
}

}  // namespace oscimark
