#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oscimark/bands.hpp"
#include "oscimark/recording.hpp"

namespace oscimark {

// A shared band-limited source injected into one channel pair; the
// per-subject coupling gain (strength * U(0,1)) drives band coherence.
struct PlantedCoupling {
  std::string ch_a, ch_b;
  std::string band;
  double strength = 1.0;  // in [0, 1]; scales the per-subject gain
};

struct SynthConfig {
  int n_subjects = 50;
  double fs = 500.0;
  double duration_s = 30.0;
  Montage montage = Montage::standard_16();
  BandSet bands = BandSet::standard();
  std::vector<PlantedCoupling> couplings;
  std::vector<double> outcome_weights;  // one per coupling
  double outcome_noise_std = 0.0;
  double injection_gain = 2.0;  // source amplitude relative to unit background
  std::uint64_t master_seed = 0;

  void validate() const;
};

struct SynthSubject {
  Recording recording;
  std::vector<double> gains;  // true planted gain per coupling
  double outcome = 0.0;       // exact generative outcome
};

struct SynthCohort {
  SynthConfig config;
  std::vector<SynthSubject> subjects;
};

// Deterministic: same config (incl. seed) gives an identical cohort.
SynthCohort generate_cohort(const SynthConfig& cfg);

// Emits per-subject EEG CSVs (+ .meta sidecars), a cohort manifest with
// PANSS-FSNS endpoints encoding the outcome, and a ground-truth sidecar.
void write_cohort(const SynthCohort& cohort, const std::string& dir);

}  // namespace oscimark
