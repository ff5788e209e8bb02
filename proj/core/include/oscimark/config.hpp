#pragma once

#include <cstdint>
#include <string>

#include "oscimark/features.hpp"
#include "oscimark/pipeline.hpp"

namespace oscimark {

// Whole-run parameter set, loadable from a sectioned key=value file.
// Unknown keys are rejected; every output embeds hash() so artifacts can be
// matched to the configuration that produced them.
struct RunConfig {
  FeatureSpecConfig features;
  PipelineConfig pipeline;

  // synth
  int synth_n_subjects = 50;
  double synth_fs = 500.0;
  double synth_duration_s = 30.0;
  double synth_noise_std = 0.0;
  double synth_injection_gain = 2.0;
  std::string synth_couplings;  // "F3-P3:beta:1.0;P4-T3:gamma:0.8"
  std::string synth_weights;    // "1.0;1.0"

  int n_perm = 1000;
  int spearman_n_perm = 100000;
  std::uint64_t seed = 0;
  int workers = 1;

  static RunConfig from_file(const std::string& path);
  static RunConfig defaults() { return RunConfig{}; }

  // Canonical snapshot: stable key order, exact decimal values.
  std::string to_text() const;
  std::string hash() const;
};

}  // namespace oscimark
