#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oscimark/pipeline.hpp"

namespace oscimark {

// One row of the cohort manifest: baseline/week-4 PANSS negative subscale
// scores plus a path to the subject's EEG export.
struct ManifestEntry {
  std::string subject_id;
  std::string group;
  std::string eeg_path;  // relative to the manifest's directory
  double panss_fsns_t0 = 0.0;
  double panss_fsns_t1 = 0.0;
  std::optional<double> panss_fsps_t0;  // positive subscale, carried if present
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  std::string dir;  // for resolving eeg_path
};

Manifest load_manifest(const std::string& path);
std::string resolve_eeg_path(const Manifest& m, const ManifestEntry& e);

// ---- cross-validation report ----

// Writes <path> (key=value summary), <path stem>_predictions.csv, and a
// best-effort scatter SVG alongside.
void write_cv_report(const CvReport& report, const std::string& path,
                     const std::string& config_hash, const std::string& spec_hash);
CvReport read_cv_report(const std::string& path);

// ---- trained model ----

void write_model(const TrainedModel& model, const PrepTransform& full_prep,
                 const std::string& path, const std::string& config_hash);
struct ModelFile {
  TrainedModel model;
  std::string config_hash;
  std::string spec_version;
};
ModelFile read_model(const std::string& path);

// ---- run log ----

// Machine-readable record of one CLI invocation: config snapshot hash,
// seed, wall time, input hashes.
void write_run_log(const std::string& path, const std::string& command,
                   const std::string& config_hash, std::uint64_t seed,
                   double wall_seconds,
                   const std::vector<std::pair<std::string, std::string>>& input_hashes);

}  // namespace oscimark
