#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <sstream>

#include "oscimark/artifacts.hpp"
#include "oscimark/config.hpp"
#include "oscimark/csv.hpp"
#include "oscimark/errors.hpp"
#include "oscimark/features.hpp"
#include "oscimark/filters.hpp"
#include "oscimark/pipeline.hpp"
#include "oscimark/rng.hpp"
#include "oscimark/synth.hpp"

namespace fs = std::filesystem;
using namespace oscimark;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::EmptySelection:
      return 4;
    case ErrorKind::Schema:
    case ErrorKind::Parameter:
    case ErrorKind::Configuration:
      return 2;
    default:
      return 3;
  }
}

struct Common {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;

  RunConfig load() const {
    RunConfig cfg = config_path.empty() ? RunConfig::defaults()
                                        : RunConfig::from_file(config_path);
    if (const char* env = std::getenv("OSCIMARK_SEED"); env && !seed_set)
      cfg.seed = static_cast<std::uint64_t>(std::strtoull(env, nullptr, 10));
    if (seed_set) cfg.seed = seed;
    if (workers > 0) cfg.workers = workers;
    cfg.pipeline.workers = cfg.workers;
    return cfg;
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "run configuration file");
  cmd->add_option("--seed", c.seed, "master seed (overrides OSCIMARK_SEED)")
      ->each([&c](const std::string&) { c.seed_set = true; });
  cmd->add_option("--workers", c.workers, "worker thread count");
}

SynthConfig synth_config_from(const RunConfig& cfg) {
  SynthConfig sc;
  sc.n_subjects = cfg.synth_n_subjects;
  sc.fs = cfg.synth_fs;
  sc.duration_s = cfg.synth_duration_s;
  sc.outcome_noise_std = cfg.synth_noise_std;
  sc.injection_gain = cfg.synth_injection_gain;
  sc.master_seed = cfg.seed;
  // couplings: "F3-P3:beta:1.0;P4-T3:gamma:0.8", weights: "1.0;0.8"
  std::stringstream cs(cfg.synth_couplings);
  std::string item;
  while (std::getline(cs, item, ';')) {
    if (item.empty()) continue;
    std::size_t dash = item.find('-');
    std::size_t c1 = item.find(':');
    std::size_t c2 = item.find(':', c1 + 1);
    if (dash == std::string::npos || c1 == std::string::npos || c2 == std::string::npos ||
        dash > c1)
      throw Error(ErrorKind::Schema, "bad coupling spec: " + item);
    PlantedCoupling pc;
    pc.ch_a = item.substr(0, dash);
    pc.ch_b = item.substr(dash + 1, c1 - dash - 1);
    pc.band = item.substr(c1 + 1, c2 - c1 - 1);
    pc.strength = parse_double(item.substr(c2 + 1), "coupling strength");
    sc.couplings.push_back(std::move(pc));
  }
  std::stringstream ws(cfg.synth_weights);
  while (std::getline(ws, item, ';'))
    if (!item.empty()) sc.outcome_weights.push_back(parse_double(item, "outcome weight"));
  if (sc.outcome_weights.empty())
    sc.outcome_weights.assign(sc.couplings.size(), 1.0);
  return sc;
}

Recording preprocess(Recording rec) {
  rec = bandpass_filter(rec, 0.5, 40.0);
  rec = notch_filter(rec);
  rec = average_reference(rec);
  return rec;
}

Eigen::VectorXd outcomes_from_manifest(const Manifest& m) {
  Eigen::VectorXd y(m.entries.size());
  for (std::size_t i = 0; i < m.entries.size(); ++i)
    y[i] = endpoint_pct(m.entries[i].panss_fsns_t0, m.entries[i].panss_fsns_t1);
  return y;
}

// Align manifest rows to feature-table row order by subject id.
Eigen::VectorXd aligned_outcomes(const Manifest& m, const FeatureTable& table) {
  Eigen::VectorXd y(table.n_rows());
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    const std::string& id = table.subject_ids[i];
    auto it = std::find_if(m.entries.begin(), m.entries.end(),
                           [&](const ManifestEntry& e) { return e.subject_id == id; });
    if (it == m.entries.end())
      throw Error(ErrorKind::Schema, "subject " + id + " missing from manifest");
    y[i] = endpoint_pct(it->panss_fsns_t0, it->panss_fsns_t1);
  }
  return y;
}

void emit_run_log(const std::string& out_dir, const std::string& command,
                  const RunConfig& cfg, const Timer& timer,
                  const std::vector<std::pair<std::string, std::string>>& inputs) {
  write_text_file((fs::path(out_dir) / "config_snapshot.txt").string(), cfg.to_text());
  write_run_log((fs::path(out_dir) / ("run_" + command + ".log")).string(), command,
                cfg.hash(), cfg.seed, timer.seconds(), inputs);
}

int cmd_synth(const Common& common, const std::string& out_dir) {
  Timer timer;
  RunConfig cfg = common.load();
  SynthConfig sc = synth_config_from(cfg);
  sc.validate();
  SynthCohort cohort = generate_cohort(sc);
  fs::create_directories(out_dir);
  write_cohort(cohort, out_dir);
  emit_run_log(out_dir, "synth", cfg, timer, {});
  std::cout << "wrote " << cohort.subjects.size() << " subjects to " << out_dir << "\n";
  return 0;
}

int cmd_features(const Common& common, const std::string& manifest_path,
                 const std::string& out_dir) {
  Timer timer;
  RunConfig cfg = common.load();
  Manifest manifest = load_manifest(manifest_path);
  if (manifest.entries.empty())
    throw Error(ErrorKind::Schema, "manifest has no subjects");

  Montage montage = Montage::standard_16();
  BandSet bands = BandSet::standard();
  FeatureSpec spec = FeatureSpec::build(montage, bands, cfg.features);

  std::vector<Recording> recs;
  recs.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries)
    recs.push_back(preprocess(load_recording(resolve_eeg_path(manifest, e), montage)));

  fs::create_directories(out_dir);
  StateModelSet models;
  if (cfg.features.dynfc) {
    for (const auto& band_name : cfg.features.dynfc_bands) {
      const Band& band = bands.get(band_name);
      std::vector<Eigen::VectorXd> pooled;
      for (const auto& rec : recs) {
        auto v = wpli_window_vectors(rec, band, cfg.features.window_len_s,
                                     cfg.features.window_step_s);
        pooled.insert(pooled.end(), v.begin(), v.end());
      }
      StateModel model = cluster_states(pooled, cfg.features.n_states,
                                        child_seed(cfg.seed, 7000 + models.size()),
                                        band_name);
      save_state_model(model,
                       (fs::path(out_dir) / ("states_" + band_name + ".txt")).string());
      models[band_name] = std::move(model);
    }
  }

  FeatureTable table;
  table.feature_names = spec.names();
  table.values.resize(static_cast<Eigen::Index>(recs.size()),
                      static_cast<Eigen::Index>(spec.size()));
  table.missing.assign(recs.size(), std::vector<bool>(spec.size(), false));
  for (std::size_t i = 0; i < recs.size(); ++i) {
    table.subject_ids.push_back(manifest.entries[i].subject_id);
    table.values.row(static_cast<Eigen::Index>(i)) =
        extract_features(recs[i], spec, bands, cfg.features.dynfc ? &models : nullptr)
            .transpose();
  }
  table.validate();
  write_table(table, (fs::path(out_dir) / "features.csv").string());
  emit_run_log(out_dir, "features", cfg, timer,
               {{"manifest", content_hash(read_text_file(manifest_path))}});
  std::cout << "wrote " << table.n_rows() << " x " << table.n_cols()
            << " feature table to " << out_dir << "\n";
  return 0;
}

int cmd_train(const Common& common, const std::string& features_path,
              const std::string& manifest_path, const std::string& out_dir) {
  Timer timer;
  RunConfig cfg = common.load();
  Montage montage = Montage::standard_16();
  FeatureSpec spec = FeatureSpec::build(montage, BandSet::standard(), cfg.features);
  FeatureTable table = read_table(features_path, spec.names());
  Manifest manifest = load_manifest(manifest_path);
  Eigen::VectorXd y = aligned_outcomes(manifest, table);

  CvReport report = nested_cv(table, y, cfg.pipeline, cfg.seed);
  fs::create_directories(out_dir);
  write_cv_report(report, (fs::path(out_dir) / "cv_report.txt").string(), cfg.hash(),
                  spec.hash());
  TrainedModel model = fit_full_model(table, y, cfg.pipeline, cfg.seed);
  model.spec_hash = spec.hash();
  write_model(model, model.prep, (fs::path(out_dir) / "model.txt").string(), cfg.hash());
  emit_run_log(out_dir, "train", cfg, timer,
               {{"features", content_hash(read_text_file(features_path))},
                {"manifest", content_hash(read_text_file(manifest_path))}});
  std::cout << "fold_mean_r="
            << (report.fold_mean_r ? format_double(*report.fold_mean_r) : "nan") << "\n";
  return 0;
}

int cmd_predict(const Common& common, const std::string& model_path,
                const std::string& features_path, const std::string& out_path) {
  Timer timer;
  RunConfig cfg = common.load();
  ModelFile mf = read_model(model_path);
  FeatureTable table = read_table(features_path);

  // Restrict the table to the model's features, in model order.
  FeatureTable sub;
  sub.subject_ids = table.subject_ids;
  sub.feature_names = mf.model.selected_features;
  sub.values.resize(table.values.rows(),
                    static_cast<Eigen::Index>(mf.model.selected_features.size()));
  sub.missing.assign(table.n_rows(),
                     std::vector<bool>(mf.model.selected_features.size(), false));
  for (std::size_t j = 0; j < mf.model.selected_features.size(); ++j) {
    auto it = std::find(table.feature_names.begin(), table.feature_names.end(),
                        mf.model.selected_features[j]);
    if (it == table.feature_names.end())
      throw Error(ErrorKind::Schema,
                  "feature table lacks model feature " + mf.model.selected_features[j]);
    Eigen::Index col = it - table.feature_names.begin();
    sub.values.col(static_cast<Eigen::Index>(j)) = table.values.col(col);
    for (std::size_t i = 0; i < table.n_rows(); ++i)
      sub.missing[i][j] = table.missing[i][col];
  }

  Eigen::VectorXd pred = apply_model(mf.model, sub);
  std::ostringstream o;
  o << "subject_id,predicted,responder\n";
  for (std::size_t i = 0; i < sub.subject_ids.size(); ++i)
    o << sub.subject_ids[i] << ',' << format_double(pred[i]) << ','
      << (classify_responder(pred[i]) ? 1 : 0) << "\n";
  write_text_file(out_path, o.str());
  write_run_log(out_path + ".log", "predict", mf.config_hash, cfg.seed, timer.seconds(),
                {{"model", content_hash(read_text_file(model_path))},
                 {"features", content_hash(read_text_file(features_path))}});
  std::cout << "wrote predictions for " << sub.subject_ids.size() << " subjects\n";
  return 0;
}

int cmd_permtest(const Common& common, const std::string& features_path,
                 const std::string& manifest_path, const std::string& out_path,
                 int n_perm_override) {
  Timer timer;
  RunConfig cfg = common.load();
  if (n_perm_override > 0) cfg.n_perm = n_perm_override;
  FeatureTable table = read_table(features_path);
  Manifest manifest = load_manifest(manifest_path);
  Eigen::VectorXd y = aligned_outcomes(manifest, table);

  PermutationResult res = permutation_test(table, y, cfg.pipeline, cfg.n_perm, cfg.seed);
  std::ostringstream o;
  o << "config_hash=" << cfg.hash() << "\n";
  o << "seed=" << cfg.seed << "\n";
  o << "n_perm=" << cfg.n_perm << "\n";
  o << "observed_r=" << format_double(res.observed) << "\n";
  o << "p=" << format_double(res.p) << "\n";
  for (std::size_t i = 0; i < res.null_values.size(); ++i)
    o << "null" << i << "=" << format_double(res.null_values[i]) << "\n";
  write_text_file(out_path, o.str());
  write_run_log(out_path + ".log", "permtest", cfg.hash(), cfg.seed, timer.seconds(),
                {{"features", content_hash(read_text_file(features_path))},
                 {"manifest", content_hash(read_text_file(manifest_path))}});
  std::cout << "observed_r=" << format_double(res.observed)
            << " p=" << format_double(res.p) << "\n";
  return 0;
}

int cmd_correlate(const Common& common, const std::string& delta_path,
                  const std::string& manifest_path, const std::string& out_path) {
  Timer timer;
  RunConfig cfg = common.load();
  FeatureTable table = read_table(delta_path);
  Manifest manifest = load_manifest(manifest_path);
  Eigen::VectorXd y = aligned_outcomes(manifest, table);

  std::ostringstream o;
  o << "feature,rho,p\n";
  for (std::size_t j = 0; j < table.n_cols(); ++j) {
    Eigen::VectorXd col = table.values.col(static_cast<Eigen::Index>(j));
    bool any_missing = false;
    for (std::size_t i = 0; i < table.n_rows(); ++i)
      if (table.missing[i][j]) any_missing = true;
    if (any_missing) {
      o << table.feature_names[j] << ",nan,nan\n";
      continue;
    }
    auto [rho, p] =
        spearman_perm(col, y, cfg.spearman_n_perm, child_seed(cfg.seed, 5000 + j));
    o << table.feature_names[j] << ',' << format_double(rho) << ',' << format_double(p)
      << "\n";
  }
  write_text_file(out_path, o.str());
  write_run_log(out_path + ".log", "correlate", cfg.hash(), cfg.seed, timer.seconds(),
                {{"delta", content_hash(read_text_file(delta_path))},
                 {"manifest", content_hash(read_text_file(manifest_path))}});
  std::cout << "wrote correlations for " << table.n_cols() << " features\n";
  return 0;
}

int cmd_report(const Common& common, const std::string& report_path) {
  RunConfig cfg = common.load();
  std::string recorded_hash;
  for (auto& [k, v] : read_kv(report_path))
    if (k == "config_hash") recorded_hash = v;
  if (!common.config_path.empty() && recorded_hash != cfg.hash())
    throw Error(ErrorKind::Configuration,
                "report was produced under config " + recorded_hash +
                    ", current config hashes to " + cfg.hash());
  CvReport report = read_cv_report(report_path);
  std::cout << "subjects: " << report.subject_ids.size() << "\n";
  std::cout << "folds: " << report.folds.size() << "\n";
  std::cout << "fold_mean_r: "
            << (report.fold_mean_r ? format_double(*report.fold_mean_r) : "nan") << "\n";
  std::cout << "pooled_r: "
            << (report.pooled_r ? format_double(*report.pooled_r) : "nan") << "\n";
  std::cout << "pooled_rmse: " << format_double(report.pooled_rmse) << "\n";
  std::cout << "pooled_mae: " << format_double(report.pooled_mae) << "\n";
  for (std::size_t f = 0; f < report.folds.size(); ++f) {
    const auto& fm = report.folds[f];
    std::cout << "fold " << f << ": r="
              << (fm.r ? format_double(*fm.r) : "nan") << " C=" << fm.c
              << " eps=" << fm.eps << " features=" << fm.selected_features.size()
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EEG feature extraction and treatment-response modelling toolchain"};
  app.require_subcommand(1);

  Common c_synth, c_feat, c_train, c_pred, c_perm, c_corr, c_rep;
  std::string out_dir = "out", manifest_path, features_path, model_path,
              out_path = "predictions.csv", delta_path, report_path;
  int n_perm_override = 0;

  auto* s = app.add_subcommand("synth", "generate a synthetic cohort");
  add_common(s, c_synth);
  s->add_option("--out", out_dir, "output directory");

  auto* f = app.add_subcommand("features", "extract the cohort feature table");
  add_common(f, c_feat);
  f->add_option("--manifest", manifest_path, "cohort manifest CSV")->required();
  f->add_option("--out", out_dir, "output directory");

  auto* t = app.add_subcommand("train", "nested CV evaluation + full-cohort model");
  add_common(t, c_train);
  t->add_option("--features", features_path, "feature table CSV")->required();
  t->add_option("--manifest", manifest_path, "cohort manifest CSV")->required();
  t->add_option("--out", out_dir, "output directory");

  auto* p = app.add_subcommand("predict", "apply a trained model");
  add_common(p, c_pred);
  p->add_option("--model", model_path, "model file")->required();
  p->add_option("--features", features_path, "feature table CSV")->required();
  p->add_option("--out", out_path, "predictions CSV path");

  auto* pm = app.add_subcommand("permtest", "permutation significance test");
  add_common(pm, c_perm);
  pm->add_option("--features", features_path, "feature table CSV")->required();
  pm->add_option("--manifest", manifest_path, "cohort manifest CSV")->required();
  pm->add_option("--out", out_path, "result path");
  pm->add_option("--n-perm", n_perm_override, "permutation count override");

  auto* co = app.add_subcommand("correlate", "feature-change vs outcome correlations");
  add_common(co, c_corr);
  co->add_option("--delta", delta_path, "delta feature table CSV")->required();
  co->add_option("--manifest", manifest_path, "cohort manifest CSV")->required();
  co->add_option("--out", out_path, "result path");

  auto* r = app.add_subcommand("report", "summarize a CV report");
  add_common(r, c_rep);
  r->add_option("--report", report_path, "cv report file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (s->parsed()) return cmd_synth(c_synth, out_dir);
    if (f->parsed()) return cmd_features(c_feat, manifest_path, out_dir);
    if (t->parsed()) return cmd_train(c_train, features_path, manifest_path, out_dir);
    if (p->parsed()) return cmd_predict(c_pred, model_path, features_path, out_path);
    if (pm->parsed())
      return cmd_permtest(c_perm, features_path, manifest_path, out_path, n_perm_override);
    if (co->parsed()) return cmd_correlate(c_corr, delta_path, manifest_path, out_path);
    if (r->parsed()) return cmd_report(c_rep, report_path);
  } catch (const Error& e) {
    std::cerr << "error[" << error_kind_name(e.kind()) << "]: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error[computation]: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
