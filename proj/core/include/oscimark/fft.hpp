#pragma once

#include <complex>
#include <vector>

namespace oscimark {

// Real-to-complex FFT; returns n/2+1 one-sided bins.
std::vector<std::complex<double>> rfft(const std::vector<double>& x);

// Complex forward / inverse FFT (inverse is normalized by 1/n).
std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& x);
std::vector<std::complex<double>> ifft(const std::vector<std::complex<double>>& x);

// Discrete analytic signal: band of positive frequencies doubled,
// negative frequencies zeroed, DC/Nyquist kept.
std::vector<std::complex<double>> analytic_signal(const std::vector<double>& x);

}  // namespace oscimark
