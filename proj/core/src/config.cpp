#include "oscimark/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "oscimark/csv.hpp"
#include "oscimark/errors.hpp"

namespace oscimark {

namespace {

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t pos = s.find(sep, start);
    std::string tok = (pos == std::string::npos) ? s.substr(start)
                                                 : s.substr(start, pos - start);
    if (!tok.empty()) out.push_back(tok);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error(ErrorKind::Schema, "boolean expected for " + key + ", got '" + v + "'");
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string join_doubles(const std::vector<double>& items, char sep) {
  std::vector<std::string> s;
  for (double v : items) s.push_back(format_double(v));
  return join(s, sep);
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Schema, "cannot open config: " + path);

  RunConfig cfg;
  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t h = line.find('#');
    if (h != std::string::npos) line = line.substr(0, h);
    std::size_t a = line.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    std::size_t b = line.find_last_not_of(" \t");
    line = line.substr(a, b - a + 1);
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Schema,
                  "config line " + std::to_string(line_no) + " is not key=value");
    auto trim = [](std::string s) {
      std::size_t x = s.find_first_not_of(" \t");
      std::size_t y = s.find_last_not_of(" \t");
      return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
    };
    std::string key = section.empty() ? trim(line.substr(0, eq))
                                      : section + "." + trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));

    auto num = [&]() { return parse_double(val, "config key " + key); };
    auto grid = [&]() {
      std::vector<double> g;
      for (const auto& tok : split_list(val, ','))
        g.push_back(parse_double(tok, "config key " + key));
      return g;
    };

    if (key == "features.power") cfg.features.power = parse_bool(val, key);
    else if (key == "features.region_power") cfg.features.region_power = parse_bool(val, key);
    else if (key == "features.coherence") cfg.features.coherence = parse_bool(val, key);
    else if (key == "features.dynfc") cfg.features.dynfc = parse_bool(val, key);
    else if (key == "features.coherence_pooled") cfg.features.coherence_pooled = parse_bool(val, key);
    else if (key == "features.bands") cfg.features.bands = split_list(val, ',');
    else if (key == "features.dynfc_bands") cfg.features.dynfc_bands = split_list(val, ',');
    else if (key == "features.n_states") cfg.features.n_states = static_cast<int>(num());
    else if (key == "features.window_len_s") cfg.features.window_len_s = num();
    else if (key == "features.window_step_s") cfg.features.window_step_s = num();
    else if (key == "features.nperseg") cfg.features.nperseg = static_cast<int>(num());
    else if (key == "features.overlap") cfg.features.overlap = num();
    else if (key == "enet.alpha") cfg.pipeline.enet.alpha = num();
    else if (key == "enet.lambda") cfg.pipeline.enet.lambda = num();
    else if (key == "enet.tol") cfg.pipeline.enet.tol = num();
    else if (key == "enet.max_iter") cfg.pipeline.enet.max_iter = static_cast<int>(num());
    else if (key == "enet.scale_by_n") cfg.pipeline.enet.scale_by_n = parse_bool(val, key);
    else if (key == "select.majority") cfg.pipeline.select_loocv_majority = num();
    else if (key == "select.min_folds") cfg.pipeline.select_min_folds = static_cast<int>(num());
    else if (key == "select.folds") cfg.pipeline.n_select_folds = static_cast<int>(num());
    else if (key == "svr.tol") cfg.pipeline.svr_tol = num();
    else if (key == "svr.max_updates") cfg.pipeline.svr_max_updates = static_cast<int>(num());
    else if (key == "svr.c_grid") cfg.pipeline.svr_c_grid = grid();
    else if (key == "svr.eps_grid") cfg.pipeline.svr_eps_grid = grid();
    else if (key == "cv.outer_folds") cfg.pipeline.n_outer_folds = static_cast<int>(num());
    else if (key == "cv.min_fold_r_size") cfg.pipeline.min_fold_r_size = static_cast<int>(num());
    else if (key == "perm.n_perm") cfg.n_perm = static_cast<int>(num());
    else if (key == "spearman.n_perm") cfg.spearman_n_perm = static_cast<int>(num());
    else if (key == "run.seed") cfg.seed = static_cast<std::uint64_t>(num());
    else if (key == "run.workers") cfg.workers = static_cast<int>(num());
    else if (key == "synth.n_subjects") cfg.synth_n_subjects = static_cast<int>(num());
    else if (key == "synth.fs") cfg.synth_fs = num();
    else if (key == "synth.duration_s") cfg.synth_duration_s = num();
    else if (key == "synth.noise_std") cfg.synth_noise_std = num();
    else if (key == "synth.injection_gain") cfg.synth_injection_gain = num();
    else if (key == "synth.couplings") cfg.synth_couplings = val;
    else if (key == "synth.weights") cfg.synth_weights = val;
    else
      throw Error(ErrorKind::Schema, "unknown config key: " + key);
  }
  cfg.pipeline.workers = cfg.workers;
  return cfg;
}

std::string RunConfig::to_text() const {
  std::ostringstream o;
  o << "[features]\n";
  o << "power=" << (features.power ? "true" : "false") << "\n";
  o << "region_power=" << (features.region_power ? "true" : "false") << "\n";
  o << "coherence=" << (features.coherence ? "true" : "false") << "\n";
  o << "dynfc=" << (features.dynfc ? "true" : "false") << "\n";
  o << "coherence_pooled=" << (features.coherence_pooled ? "true" : "false") << "\n";
  o << "bands=" << join(features.bands, ',') << "\n";
  o << "dynfc_bands=" << join(features.dynfc_bands, ',') << "\n";
  o << "n_states=" << features.n_states << "\n";
  o << "window_len_s=" << format_double(features.window_len_s) << "\n";
  o << "window_step_s=" << format_double(features.window_step_s) << "\n";
  o << "nperseg=" << features.nperseg << "\n";
  o << "overlap=" << format_double(features.overlap) << "\n";
  o << "[enet]\n";
  o << "alpha=" << format_double(pipeline.enet.alpha) << "\n";
  o << "lambda=" << format_double(pipeline.enet.lambda) << "\n";
  o << "tol=" << format_double(pipeline.enet.tol) << "\n";
  o << "max_iter=" << pipeline.enet.max_iter << "\n";
  o << "scale_by_n=" << (pipeline.enet.scale_by_n ? "true" : "false") << "\n";
  o << "[select]\n";
  o << "majority=" << format_double(pipeline.select_loocv_majority) << "\n";
  o << "min_folds=" << pipeline.select_min_folds << "\n";
  o << "folds=" << pipeline.n_select_folds << "\n";
  o << "[svr]\n";
  o << "tol=" << format_double(pipeline.svr_tol) << "\n";
  o << "max_updates=" << pipeline.svr_max_updates << "\n";
  o << "c_grid=" << join_doubles(pipeline.c_grid(), ',') << "\n";
  o << "eps_grid=" << join_doubles(pipeline.eps_grid(), ',') << "\n";
  o << "[cv]\n";
  o << "outer_folds=" << pipeline.n_outer_folds << "\n";
  o << "min_fold_r_size=" << pipeline.min_fold_r_size << "\n";
  o << "[perm]\n";
  o << "n_perm=" << n_perm << "\n";
  o << "[spearman]\n";
  o << "n_perm=" << spearman_n_perm << "\n";
  o << "[run]\n";
  o << "seed=" << seed << "\n";
  o << "[synth]\n";
  o << "n_subjects=" << synth_n_subjects << "\n";
  o << "fs=" << format_double(synth_fs) << "\n";
  o << "duration_s=" << format_double(synth_duration_s) << "\n";
  o << "noise_std=" << format_double(synth_noise_std) << "\n";
  o << "injection_gain=" << format_double(synth_injection_gain) << "\n";
  o << "couplings=" << synth_couplings << "\n";
  o << "weights=" << synth_weights << "\n";
  return o.str();
}

std::string RunConfig::hash() const { return content_hash(to_text()); }

}  // namespace oscimark
