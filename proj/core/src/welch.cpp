#include "oscimark/welch.hpp"

#include <cmath>
#include <numbers>

#include "oscimark/errors.hpp"
#include "oscimark/fft.hpp"

namespace oscimark {

namespace {

std::vector<double> hamming(int n) {
  std::vector<double> w(n);
  for (int k = 0; k < n; ++k)
    w[k] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * k / (n - 1));
  return w;
}

}  // namespace

SegmentSpectra compute_segment_spectra(const Recording& rec, int nperseg, double overlap) {
  if (nperseg < 2) throw Error(ErrorKind::Parameter, "nperseg must be >= 2");
  if (!(overlap >= 0.0 && overlap < 1.0))
    throw Error(ErrorKind::Parameter, "overlap must be in [0, 1)");
  const Eigen::Index n = rec.n_samples();
  if (n < nperseg)
    throw Error(ErrorKind::InsufficientData,
                "recording shorter than one Welch segment (" + std::to_string(n) + " < " +
                    std::to_string(nperseg) + ")");
  const int step = std::max(1, static_cast<int>(std::lround(nperseg * (1.0 - overlap))));
  const int n_seg = static_cast<int>((n - nperseg) / step) + 1;
  const int n_bins = nperseg / 2 + 1;

  auto w = hamming(nperseg);
  double wnorm = 0.0;
  for (double v : w) wnorm += v * v;

  SegmentSpectra out;
  out.fs = rec.fs;
  out.nperseg = nperseg;
  out.n_segments = n_seg;
  out.window_norm = wnorm;
  out.freqs.resize(n_bins);
  for (int k = 0; k < n_bins; ++k) out.freqs[k] = k * rec.fs / nperseg;

  out.channel_fft.resize(rec.n_channels());
  std::vector<double> seg(nperseg);
  Eigen::VectorXd channel;
  for (Eigen::Index c = 0; c < rec.n_channels(); ++c) {
    channel = rec.data.row(c);  // contiguous copy; rows are strided in storage
    Eigen::MatrixXcd& F = out.channel_fft[c];
    F.resize(n_bins, n_seg);
    for (int s = 0; s < n_seg; ++s) {
      const double* base = channel.data() + static_cast<std::size_t>(s) * step;
      double mean = 0.0;
      for (int k = 0; k < nperseg; ++k) mean += base[k];
      mean /= nperseg;
      for (int k = 0; k < nperseg; ++k) seg[k] = (base[k] - mean) * w[k];
      auto spec = rfft(seg);
      for (int k = 0; k < n_bins; ++k) F(k, s) = spec[k];
    }
  }
  return out;
}

PsdEstimate psd_from_spectra(const SegmentSpectra& sp) {
  const int n_bins = static_cast<int>(sp.freqs.size());
  const int n_ch = static_cast<int>(sp.channel_fft.size());
  PsdEstimate psd;
  psd.freqs = sp.freqs;
  psd.df = sp.fs / sp.nperseg;
  psd.n_segments = sp.n_segments;
  psd.power.resize(n_ch, n_bins);
  const double scale = 1.0 / (sp.fs * sp.window_norm);
  for (int c = 0; c < n_ch; ++c) {
    for (int k = 0; k < n_bins; ++k) {
      double acc = 0.0;
      for (int s = 0; s < sp.n_segments; ++s) acc += std::norm(sp.channel_fft[c](k, s));
      double p = scale * acc / sp.n_segments;
      // one-sided: double everything except DC and Nyquist
      if (k != 0 && !(sp.nperseg % 2 == 0 && k == n_bins - 1)) p *= 2.0;
      psd.power(c, k) = p;
    }
  }
  return psd;
}

PsdEstimate welch_psd(const Recording& rec, int nperseg, double overlap) {
  return psd_from_spectra(compute_segment_spectra(rec, nperseg, overlap));
}

CoherenceSpectrum msc_from_spectra(const SegmentSpectra& sp, int ch_a, int ch_b) {
  if (sp.n_segments < 2)
    throw Error(ErrorKind::InsufficientData,
                "coherence needs at least 2 Welch segments");
  if (ch_a < 0 || ch_b < 0 || ch_a >= static_cast<int>(sp.channel_fft.size()) ||
      ch_b >= static_cast<int>(sp.channel_fft.size()))
    throw Error(ErrorKind::Parameter, "coherence channel index out of range");
  const int n_bins = static_cast<int>(sp.freqs.size());
  CoherenceSpectrum out;
  out.ch_a = ch_a;
  out.ch_b = ch_b;
  out.freqs = sp.freqs;
  out.coherence.resize(n_bins);
  out.zero_power.assign(n_bins, false);
  const Eigen::MatrixXcd& A = sp.channel_fft[ch_a];
  const Eigen::MatrixXcd& B = sp.channel_fft[ch_b];
  for (int k = 0; k < n_bins; ++k) {
    std::complex<double> sxy(0.0, 0.0);
    double sxx = 0.0, syy = 0.0;
    for (int s = 0; s < sp.n_segments; ++s) {
      sxy += A(k, s) * std::conj(B(k, s));
      sxx += std::norm(A(k, s));
      syy += std::norm(B(k, s));
    }
    if (sxx <= 0.0 || syy <= 0.0) {
      out.coherence[k] = 0.0;
      out.zero_power[k] = true;
    } else {
      double c = std::norm(sxy) / (sxx * syy);
      out.coherence[k] = std::clamp(c, 0.0, 1.0);
    }
  }
  return out;
}

CoherenceSpectrum msc_coherence(const Recording& rec, int ch_a, int ch_b, int nperseg,
                                double overlap) {
  return msc_from_spectra(compute_segment_spectra(rec, nperseg, overlap), ch_a, ch_b);
}

std::vector<int> band_bins(const Eigen::VectorXd& freqs, const Band& band) {
  if (!(band.lo_hz < band.hi_hz))
    throw Error(ErrorKind::Parameter, "degenerate band: " + band.name);
  std::vector<int> bins;
  for (int k = 0; k < freqs.size(); ++k)
    if (freqs[k] >= band.lo_hz && freqs[k] < band.hi_hz) bins.push_back(k);
  if (bins.empty())
    throw Error(ErrorKind::Parameter,
                "band '" + band.name + "' contains no frequency bins");
  return bins;
}

Eigen::VectorXd band_power(const PsdEstimate& psd, const Band& band) {
  auto bins = band_bins(psd.freqs, band);
  Eigen::VectorXd out(psd.power.rows());
  for (Eigen::Index c = 0; c < psd.power.rows(); ++c) {
    double acc = 0.0;
    for (int k : bins) acc += psd.power(c, k);
    out[c] = acc / bins.size();
  }
  return out;
}

std::vector<std::pair<std::string, double>> region_power(
    const Eigen::VectorXd& channel_values, const Montage& montage) {
  if (channel_values.size() != static_cast<Eigen::Index>(montage.size()))
    throw Error(ErrorKind::Parameter, "channel value count does not match montage");
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [name, chans] : montage.regions) {
    double acc = 0.0;
    for (const auto& ch : chans) {
      int idx = montage.index_of(ch);
      if (idx < 0)
        throw Error(ErrorKind::Configuration,
                    "region '" + name + "' references missing channel '" + ch + "'");
      acc += channel_values[idx];
    }
    out.emplace_back(name, acc / chans.size());
  }
  out.emplace_back("global", channel_values.mean());
  return out;
}

double band_coherence(const CoherenceSpectrum& coh, const Band& band) {
  auto bins = band_bins(coh.freqs, band);
  double acc = 0.0;
  for (int k : bins) acc += coh.coherence[k];
  return acc / bins.size();
}

double band_coherence_pooled(const SegmentSpectra& sp, int ch_a, int ch_b,
                             const Band& band) {
  auto bins = band_bins(sp.freqs, band);
  const Eigen::MatrixXcd& A = sp.channel_fft[ch_a];
  const Eigen::MatrixXcd& B = sp.channel_fft[ch_b];
  std::complex<double> sxy(0.0, 0.0);
  double sxx = 0.0, syy = 0.0;
  for (int k : bins) {
    for (int s = 0; s < sp.n_segments; ++s) {
      sxy += A(k, s) * std::conj(B(k, s));
      sxx += std::norm(A(k, s));
      syy += std::norm(B(k, s));
    }
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return std::clamp(std::norm(sxy) / (sxx * syy), 0.0, 1.0);
}

}  // namespace oscimark
