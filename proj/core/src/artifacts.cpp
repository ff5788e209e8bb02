#include "oscimark/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include "oscimark/csv.hpp"
#include "oscimark/errors.hpp"

namespace fs = std::filesystem;

namespace oscimark {

namespace {

constexpr const char* kSpecVersion = "1";

std::string stem_path(const std::string& path) {
  fs::path p(path);
  return (p.parent_path() / p.stem()).string();
}

std::map<std::string, std::string> kv_map(const std::string& path) {
  std::map<std::string, std::string> m;
  for (auto& [k, v] : read_kv(path)) m[k] = v;
  return m;
}

const std::string& require(const std::map<std::string, std::string>& m,
                           const std::string& key, const std::string& path) {
  auto it = m.find(key);
  if (it == m.end())
    throw Error(ErrorKind::Schema, path + ": missing key '" + key + "'");
  return it->second;
}

std::vector<std::string> split_semicolon(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t pos = s.find(';', start);
    std::string tok = (pos == std::string::npos) ? s.substr(start)
                                                 : s.substr(start, pos - start);
    if (!tok.empty()) out.push_back(tok);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

void write_scatter_svg(const CvReport& report, const std::string& path) {
  std::vector<double> xs, ys;
  for (int i = 0; i < report.observed.size(); ++i) {
    if (std::isfinite(report.observed[i]) && std::isfinite(report.predicted[i])) {
      xs.push_back(report.observed[i]);
      ys.push_back(report.predicted[i]);
    }
  }
  if (xs.empty()) return;
  double xlo = *std::min_element(xs.begin(), xs.end());
  double xhi = *std::max_element(xs.begin(), xs.end());
  double ylo = *std::min_element(ys.begin(), ys.end());
  double yhi = *std::max_element(ys.begin(), ys.end());
  if (xhi - xlo < 1e-12) { xlo -= 0.5; xhi += 0.5; }
  if (yhi - ylo < 1e-12) { ylo -= 0.5; yhi += 0.5; }
  const double w = 480, h = 480, m = 50;
  auto px = [&](double x) { return m + (x - xlo) / (xhi - xlo) * (w - 2 * m); };
  auto py = [&](double y) { return h - m - (y - ylo) / (yhi - ylo) * (h - 2 * m); };
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\">\n";
  o << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  o << "<line x1=\"" << m << "\" y1=\"" << h - m << "\" x2=\"" << w - m << "\" y2=\""
    << h - m << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\"" << h - m
    << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << w / 2 << "\" y=\"" << h - 12
    << "\" text-anchor=\"middle\" font-size=\"12\">observed</text>\n";
  o << "<text x=\"14\" y=\"" << h / 2
    << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 " << h / 2
    << ")\">predicted</text>\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    o << "<circle cx=\"" << px(xs[i]) << "\" cy=\"" << py(ys[i])
      << "\" r=\"3\" fill=\"steelblue\" fill-opacity=\"0.7\"/>\n";
  if (report.fold_mean_r)
    o << "<text x=\"" << w - m << "\" y=\"" << m
      << "\" text-anchor=\"end\" font-size=\"12\">r = " << *report.fold_mean_r
      << "</text>\n";
  o << "</svg>\n";
  write_text_file(path, o.str());
}

}  // namespace

Manifest load_manifest(const std::string& path) {
  auto rows = read_csv(path);
  if (rows.empty()) throw Error(ErrorKind::Schema, path + ": empty manifest");
  const auto& header = rows.front();
  auto col = [&](const std::string& name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  int c_id = col("subject_id"), c_group = col("group"), c_path = col("eeg_path");
  int c_t0 = col("panss_fsns_t0"), c_t1 = col("panss_fsns_t1");
  int c_p0 = col("panss_fsps_t0");
  if (c_id < 0 || c_group < 0 || c_path < 0 || c_t0 < 0 || c_t1 < 0)
    throw Error(ErrorKind::Schema,
                path + ": manifest header must contain subject_id, group, eeg_path, "
                       "panss_fsns_t0, panss_fsns_t1");
  Manifest m;
  m.dir = fs::path(path).parent_path().string();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size())
      throw Error(ErrorKind::Schema,
                  path + ": row " + std::to_string(r + 1) + " has " +
                      std::to_string(row.size()) + " fields, expected " +
                      std::to_string(header.size()));
    ManifestEntry e;
    e.subject_id = row[c_id];
    e.group = row[c_group];
    e.eeg_path = row[c_path];
    e.panss_fsns_t0 = parse_double(row[c_t0], path + " panss_fsns_t0");
    e.panss_fsns_t1 = parse_double(row[c_t1], path + " panss_fsns_t1");
    if (c_p0 >= 0 && !row[c_p0].empty())
      e.panss_fsps_t0 = parse_double(row[c_p0], path + " panss_fsps_t0");
    if (e.subject_id.empty())
      throw Error(ErrorKind::Schema, path + ": empty subject_id at row " + std::to_string(r + 1));
    m.entries.push_back(std::move(e));
  }
  return m;
}

std::string resolve_eeg_path(const Manifest& m, const ManifestEntry& e) {
  fs::path p(e.eeg_path);
  if (p.is_absolute() || m.dir.empty()) return p.string();
  return (fs::path(m.dir) / p).string();
}

void write_cv_report(const CvReport& report, const std::string& path,
                     const std::string& config_hash, const std::string& spec_hash) {
  std::ostringstream o;
  o << "config_hash=" << config_hash << "\n";
  o << "spec_hash=" << spec_hash << "\n";
  o << "seed=" << report.seed << "\n";
  o << "n_subjects=" << report.subject_ids.size() << "\n";
  o << "n_folds=" << report.folds.size() << "\n";
  o << "fold_mean_r="
    << (report.fold_mean_r ? format_double(*report.fold_mean_r) : std::string("nan")) << "\n";
  o << "pooled_r=" << (report.pooled_r ? format_double(*report.pooled_r) : std::string("nan"))
    << "\n";
  o << "pooled_rmse=" << format_double(report.pooled_rmse) << "\n";
  o << "pooled_mae=" << format_double(report.pooled_mae) << "\n";
  for (std::size_t f = 0; f < report.folds.size(); ++f) {
    const auto& fm = report.folds[f];
    std::string p = "fold" + std::to_string(f) + ".";
    o << p << "r=" << (fm.r ? format_double(*fm.r) : std::string("nan")) << "\n";
    o << p << "rmse=" << format_double(fm.rmse) << "\n";
    o << p << "mae=" << format_double(fm.mae) << "\n";
    o << p << "c=" << format_double(fm.c) << "\n";
    o << p << "eps=" << format_double(fm.eps) << "\n";
    std::string sel;
    for (std::size_t i = 0; i < fm.selected_features.size(); ++i) {
      if (i) sel += ';';
      sel += fm.selected_features[i];
    }
    o << p << "selected=" << sel << "\n";
  }
  for (std::size_t i = 0; i < report.warnings.size(); ++i)
    o << "warning" << i << "=" << report.warnings[i] << "\n";
  write_text_file(path, o.str());

  std::ostringstream csv;
  csv << "subject_id,observed,predicted\n";
  for (std::size_t i = 0; i < report.subject_ids.size(); ++i)
    csv << report.subject_ids[i] << ',' << format_double(report.observed[i]) << ','
        << format_double(report.predicted[i]) << "\n";
  write_text_file(stem_path(path) + "_predictions.csv", csv.str());
  write_scatter_svg(report, stem_path(path) + "_scatter.svg");
}

CvReport read_cv_report(const std::string& path) {
  auto m = kv_map(path);
  CvReport report;
  report.seed = static_cast<std::uint64_t>(
      parse_double(require(m, "seed", path), path + " seed"));
  auto opt = [&](const std::string& key) -> std::optional<double> {
    const std::string& v = require(m, key, path);
    if (v == "nan") return std::nullopt;
    return parse_double(v, path + " " + key);
  };
  report.fold_mean_r = opt("fold_mean_r");
  report.pooled_r = opt("pooled_r");
  report.pooled_rmse = parse_double(require(m, "pooled_rmse", path), path);
  report.pooled_mae = parse_double(require(m, "pooled_mae", path), path);
  int n_folds = static_cast<int>(parse_double(require(m, "n_folds", path), path));
  for (int f = 0; f < n_folds; ++f) {
    std::string p = "fold" + std::to_string(f) + ".";
    FoldModel fm;
    fm.r = opt(p + "r");
    fm.rmse = parse_double(require(m, p + "rmse", path), path);
    fm.mae = parse_double(require(m, p + "mae", path), path);
    fm.c = parse_double(require(m, p + "c", path), path);
    fm.eps = parse_double(require(m, p + "eps", path), path);
    fm.selected_features = split_semicolon(require(m, p + "selected", path));
    report.folds.push_back(std::move(fm));
  }
  auto rows = read_csv(stem_path(path) + "_predictions.csv");
  if (!rows.empty()) {
    int n = static_cast<int>(rows.size()) - 1;
    report.observed.resize(n);
    report.predicted.resize(n);
    for (int i = 0; i < n; ++i) {
      const auto& row = rows[i + 1];
      if (row.size() != 3)
        throw Error(ErrorKind::Schema, path + ": malformed predictions row");
      report.subject_ids.push_back(row[0]);
      report.observed[i] = parse_double(row[1], path);
      report.predicted[i] = parse_double(row[2], path);
    }
  }
  return report;
}

void write_model(const TrainedModel& model, const PrepTransform& full_prep,
                 const std::string& path, const std::string& config_hash) {
  std::ostringstream o;
  o << "spec_version=" << kSpecVersion << "\n";
  o << "config_hash=" << config_hash << "\n";
  o << "spec_hash=" << model.spec_hash << "\n";
  o << "seed=" << model.seed << "\n";
  o << "c=" << format_double(model.c) << "\n";
  o << "eps=" << format_double(model.eps) << "\n";
  o << "b=" << format_double(model.b) << "\n";
  o << "n_features=" << model.selected_features.size() << "\n";
  for (std::size_t i = 0; i < model.selected_features.size(); ++i) {
    std::string p = "feature" + std::to_string(i) + ".";
    int col = full_prep.retained[model.prepped_columns[i]];
    const ColumnPrep& cp = full_prep.columns[col];
    o << p << "name=" << model.selected_features[i] << "\n";
    o << p << "w=" << format_double(model.w[i]) << "\n";
    o << p << "impute_mean=" << format_double(cp.impute_mean) << "\n";
    o << p << "lo_bound=" << format_double(cp.lo_bound) << "\n";
    o << p << "hi_bound=" << format_double(cp.hi_bound) << "\n";
    o << p << "replace_value=" << format_double(cp.replace_value) << "\n";
    o << p << "z_mean=" << format_double(cp.z_mean) << "\n";
    o << p << "z_std=" << format_double(cp.z_std) << "\n";
  }
  write_text_file(path, o.str());
}

ModelFile read_model(const std::string& path) {
  auto m = kv_map(path);
  ModelFile out;
  out.spec_version = require(m, "spec_version", path);
  out.config_hash = require(m, "config_hash", path);
  TrainedModel& model = out.model;
  model.spec_hash = require(m, "spec_hash", path);
  model.seed = static_cast<std::uint64_t>(parse_double(require(m, "seed", path), path));
  model.c = parse_double(require(m, "c", path), path);
  model.eps = parse_double(require(m, "eps", path), path);
  model.b = parse_double(require(m, "b", path), path);
  int n = static_cast<int>(parse_double(require(m, "n_features", path), path));
  model.w.resize(n);
  model.prep.columns.resize(n);
  for (int i = 0; i < n; ++i) {
    std::string p = "feature" + std::to_string(i) + ".";
    model.selected_features.push_back(require(m, p + "name", path));
    model.w[i] = parse_double(require(m, p + "w", path), path);
    ColumnPrep cp;
    cp.impute_mean = parse_double(require(m, p + "impute_mean", path), path);
    cp.lo_bound = parse_double(require(m, p + "lo_bound", path), path);
    cp.hi_bound = parse_double(require(m, p + "hi_bound", path), path);
    cp.replace_value = parse_double(require(m, p + "replace_value", path), path);
    cp.z_mean = parse_double(require(m, p + "z_mean", path), path);
    cp.z_std = parse_double(require(m, p + "z_std", path), path);
    model.prep.columns[i] = cp;
    model.prep.retained.push_back(i);
    model.prepped_columns.push_back(i);
  }
  return out;
}

void write_run_log(const std::string& path, const std::string& command,
                   const std::string& config_hash, std::uint64_t seed,
                   double wall_seconds,
                   const std::vector<std::pair<std::string, std::string>>& input_hashes) {
  std::ostringstream o;
  o << "command=" << command << "\n";
  o << "config_hash=" << config_hash << "\n";
  o << "seed=" << seed << "\n";
  o << "wall_seconds=" << format_double(wall_seconds) << "\n";
  for (const auto& [name, hash] : input_hashes)
    o << "input." << name << "=" << hash << "\n";
  write_text_file(path, o.str());
}

}  // namespace oscimark
