#pragma once

#include <Eigen/Dense>
#include <vector>

#include "oscimark/recording.hpp"

namespace oscimark {

// One biquad, direct form II transposed: b0,b1,b2 / 1,a1,a2.
struct Biquad {
  double b0, b1, b2, a1, a2;
};

using Sos = std::vector<Biquad>;

// Butterworth designs via bilinear transform; `order` is the analog
// prototype order, so a band filter has 2*order poles.
Sos butter_bandpass(int order, double lo_hz, double hi_hz, double fs);
Sos butter_bandstop(int order, double lo_hz, double hi_hz, double fs);

// Causal cascade filtering with step-matched initial conditions.
Eigen::VectorXd sosfilt(const Sos& sos, const Eigen::VectorXd& x);

// Zero-phase forward-backward filtering with odd-reflection padding of
// 3x the pole count.
Eigen::VectorXd filtfilt(const Sos& sos, const Eigen::VectorXd& x);

// Recording-level preprocessing steps.
Recording bandpass_filter(const Recording& rec, double lo_hz, double hi_hz);
Recording notch_filter(const Recording& rec);
Recording average_reference(const Recording& rec);

}  // namespace oscimark
