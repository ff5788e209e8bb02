#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "oscimark/bands.hpp"
#include "oscimark/recording.hpp"

namespace oscimark {

// One-sided Welch PSD, channels x frequency bins, density scaling
// (integrating power*df over the grid estimates signal variance).
struct PsdEstimate {
  Eigen::VectorXd freqs;
  Eigen::MatrixXd power;  // channels x bins
  double df = 0.0;
  int n_segments = 0;
};

// Per-segment windowed FFTs for every channel; the shared building block
// for PSD and all-pairs coherence so each segment is transformed once.
struct SegmentSpectra {
  std::vector<Eigen::MatrixXcd> channel_fft;  // per channel: bins x segments
  Eigen::VectorXd freqs;
  double fs = 0.0;
  int nperseg = 0;
  int n_segments = 0;
  double window_norm = 0.0;  // sum of squared window samples
};

struct CoherenceSpectrum {
  int ch_a = 0, ch_b = 0;
  Eigen::VectorXd freqs;
  Eigen::VectorXd coherence;       // in [0,1]
  std::vector<bool> zero_power;    // bins where an auto-spectrum vanished
};

SegmentSpectra compute_segment_spectra(const Recording& rec, int nperseg = 1000,
                                       double overlap = 0.5);

PsdEstimate welch_psd(const Recording& rec, int nperseg = 1000, double overlap = 0.5);
PsdEstimate psd_from_spectra(const SegmentSpectra& spectra);

// Magnitude-squared coherence from segment-averaged auto/cross spectra.
CoherenceSpectrum msc_from_spectra(const SegmentSpectra& spectra, int ch_a, int ch_b);
CoherenceSpectrum msc_coherence(const Recording& rec, int ch_a, int ch_b,
                                int nperseg = 1000, double overlap = 0.5);

// Mean PSD over the band's bins (bin center in [lo, hi)), one value per channel.
Eigen::VectorXd band_power(const PsdEstimate& psd, const Band& band);

// Region means over per-channel values, plus a "global" all-channel mean.
std::vector<std::pair<std::string, double>> region_power(
    const Eigen::VectorXd& channel_values, const Montage& montage);

// Mean of per-bin coherence over the band (default estimator).
double band_coherence(const CoherenceSpectrum& coh, const Band& band);

// Alternative band-pooled estimator |sum S_xy|^2 / (sum S_xx * sum S_yy);
// exposed behind a config switch, not the default.
double band_coherence_pooled(const SegmentSpectra& spectra, int ch_a, int ch_b,
                             const Band& band);

// Indices of PSD bins whose center lies in [lo, hi); errors if empty.
std::vector<int> band_bins(const Eigen::VectorXd& freqs, const Band& band);

}  // namespace oscimark
