#include "oscimark/filters.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "oscimark/errors.hpp"

namespace oscimark {

namespace {

using cplx = std::complex<double>;

struct Zpk {
  std::vector<cplx> zeros;
  std::vector<cplx> poles;
  double gain = 1.0;
};

std::vector<cplx> butter_prototype_poles(int order) {
  std::vector<cplx> poles;
  for (int k = 0; k < order; ++k) {
    double theta = std::numbers::pi * (2.0 * k + order + 1.0) / (2.0 * order);
    poles.emplace_back(std::cos(theta), std::sin(theta));
  }
  return poles;
}

// Lowpass prototype -> analog bandpass (angular edges w1 < w2, rad/s).
Zpk lp2bp(const std::vector<cplx>& proto, double w1, double w2) {
  const double bw = w2 - w1;
  const double w0sq = w1 * w2;
  Zpk out;
  for (const auto& p : proto) {
    cplx a = p * (bw / 2.0);
    cplx d = std::sqrt(a * a - w0sq);
    out.poles.push_back(a + d);
    out.poles.push_back(a - d);
  }
  out.zeros.assign(proto.size(), cplx(0.0, 0.0));
  out.gain = std::pow(bw, static_cast<double>(proto.size()));
  return out;
}

Zpk lp2bs(const std::vector<cplx>& proto, double w1, double w2) {
  const double bw = w2 - w1;
  const double w0sq = w1 * w2;
  const double w0 = std::sqrt(w0sq);
  Zpk out;
  cplx prod(1.0, 0.0);
  for (const auto& p : proto) {
    cplx a = (bw / 2.0) / p;
    cplx d = std::sqrt(a * a - w0sq);
    out.poles.push_back(a + d);
    out.poles.push_back(a - d);
    prod *= -p;
  }
  for (std::size_t k = 0; k < proto.size(); ++k) {
    out.zeros.emplace_back(0.0, w0);
    out.zeros.emplace_back(0.0, -w0);
  }
  // prototype gain 1 = prod of (-poles); bandstop gain = 1/real(prod)
  out.gain = 1.0 / prod.real();
  return out;
}

Zpk bilinear(const Zpk& analog, double fs) {
  const double fs2 = 2.0 * fs;
  Zpk out;
  cplx num(1.0, 0.0), den(1.0, 0.0);
  for (const auto& z : analog.zeros) {
    out.zeros.push_back((fs2 + z) / (fs2 - z));
    num *= (fs2 - z);
  }
  for (const auto& p : analog.poles) {
    out.poles.push_back((fs2 + p) / (fs2 - p));
    den *= (fs2 - p);
  }
  // excess poles contribute zeros at z = -1
  for (std::size_t k = analog.zeros.size(); k < analog.poles.size(); ++k)
    out.zeros.emplace_back(-1.0, 0.0);
  out.gain = analog.gain * (num / den).real();
  return out;
}

// Pair conjugate roots into quadratic factors. Roots are assumed to come in
// conjugate pairs (true for all designs here).
std::vector<std::pair<cplx, cplx>> conjugate_pairs(std::vector<cplx> roots) {
  std::vector<std::pair<cplx, cplx>> pairs;
  while (!roots.empty()) {
    cplx r = roots.back();
    roots.pop_back();
    if (std::abs(r.imag()) < 1e-12) {
      // find another (near-)real root
      auto it = std::min_element(roots.begin(), roots.end(), [](const cplx& a, const cplx& b) {
        return std::abs(a.imag()) < std::abs(b.imag());
      });
      if (it == roots.end())
        throw Error(ErrorKind::Computation, "odd real root count in filter design");
      pairs.emplace_back(r, *it);
      roots.erase(it);
    } else {
      auto it = std::min_element(roots.begin(), roots.end(), [&](const cplx& a, const cplx& b) {
        return std::abs(a - std::conj(r)) < std::abs(b - std::conj(r));
      });
      if (it == roots.end())
        throw Error(ErrorKind::Computation, "unpaired complex root in filter design");
      pairs.emplace_back(r, *it);
      roots.erase(it);
    }
  }
  return pairs;
}

Sos zpk2sos(const Zpk& zpk) {
  if (zpk.zeros.size() != zpk.poles.size())
    throw Error(ErrorKind::Computation, "zero/pole count mismatch");
  auto ppairs = conjugate_pairs(zpk.poles);
  auto zpairs = conjugate_pairs(zpk.zeros);
  // pair each pole pair with the zero pair nearest in angle
  std::sort(ppairs.begin(), ppairs.end(), [](const auto& a, const auto& b) {
    return std::abs(std::arg(a.first)) < std::abs(std::arg(b.first));
  });
  Sos sos;
  for (const auto& pp : ppairs) {
    double pang = std::abs(std::arg(pp.first));
    auto it = std::min_element(zpairs.begin(), zpairs.end(), [&](const auto& a, const auto& b) {
      return std::abs(std::abs(std::arg(a.first)) - pang) <
             std::abs(std::abs(std::arg(b.first)) - pang);
    });
    auto zp = *it;
    zpairs.erase(it);
    Biquad q;
    q.b0 = 1.0;
    q.b1 = -(zp.first + zp.second).real();
    q.b2 = (zp.first * zp.second).real();
    q.a1 = -(pp.first + pp.second).real();
    q.a2 = (pp.first * pp.second).real();
    sos.push_back(q);
  }
  // whole gain on the first section
  if (!sos.empty()) {
    sos.front().b0 *= zpk.gain;
    sos.front().b1 *= zpk.gain;
    sos.front().b2 *= zpk.gain;
  }
  return sos;
}

double warp(double f_hz, double fs) {
  return 2.0 * fs * std::tan(std::numbers::pi * f_hz / fs);
}

// Steady-state filter state for a constant unit input (transposed DF-II).
void step_zi(const Biquad& q, double& s1, double& s2) {
  double y = (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2);
  s2 = q.b2 - q.a2 * y;
  s1 = q.b1 - q.a1 * y + s2;
}

}  // namespace

Sos butter_bandpass(int order, double lo_hz, double hi_hz, double fs) {
  if (!(0 < lo_hz && lo_hz < hi_hz && hi_hz < fs / 2.0))
    throw Error(ErrorKind::Parameter, "bandpass edges must satisfy 0 < lo < hi < fs/2");
  auto proto = butter_prototype_poles(order);
  return zpk2sos(bilinear(lp2bp(proto, warp(lo_hz, fs), warp(hi_hz, fs)), fs));
}

Sos butter_bandstop(int order, double lo_hz, double hi_hz, double fs) {
  if (!(0 < lo_hz && lo_hz < hi_hz && hi_hz < fs / 2.0))
    throw Error(ErrorKind::Parameter, "bandstop edges must satisfy 0 < lo < hi < fs/2");
  auto proto = butter_prototype_poles(order);
  return zpk2sos(bilinear(lp2bs(proto, warp(lo_hz, fs), warp(hi_hz, fs)), fs));
}

Eigen::VectorXd sosfilt(const Sos& sos, const Eigen::VectorXd& x) {
  Eigen::VectorXd y = x;
  for (const auto& q : sos) {
    double zi1, zi2;
    step_zi(q, zi1, zi2);
    double s1 = zi1 * y[0];
    double s2 = zi2 * y[0];
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      double xi = y[i];
      double yi = q.b0 * xi + s1;
      s1 = q.b1 * xi - q.a1 * yi + s2;
      s2 = q.b2 * xi - q.a2 * yi;
      y[i] = yi;
    }
  }
  return y;
}

Eigen::VectorXd filtfilt(const Sos& sos, const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  const Eigen::Index pad = static_cast<Eigen::Index>(3 * 2 * sos.size());
  if (n <= pad)
    throw Error(ErrorKind::InsufficientData,
                "signal too short for zero-phase filtering (need > " +
                    std::to_string(pad) + " samples)");
  Eigen::VectorXd ext(n + 2 * pad);
  for (Eigen::Index i = 0; i < pad; ++i) ext[i] = 2.0 * x[0] - x[pad - i];
  ext.segment(pad, n) = x;
  for (Eigen::Index i = 0; i < pad; ++i) ext[pad + n + i] = 2.0 * x[n - 1] - x[n - 2 - i];

  Eigen::VectorXd fwd = sosfilt(sos, ext);
  Eigen::VectorXd rev = fwd.reverse();
  Eigen::VectorXd bwd = sosfilt(sos, rev);
  Eigen::VectorXd out = bwd.reverse().segment(pad, n);
  return out;
}

Recording bandpass_filter(const Recording& rec, double lo_hz, double hi_hz) {
  Sos sos = butter_bandpass(4, lo_hz, hi_hz, rec.fs);
  Recording out = rec;
  for (Eigen::Index c = 0; c < rec.n_channels(); ++c)
    out.data.row(c) = filtfilt(sos, rec.data.row(c).transpose()).transpose();
  return out;
}

Recording notch_filter(const Recording& rec) {
  if (!(rec.fs / 2.0 > 51.0))
    throw Error(ErrorKind::Parameter, "notch filter requires Nyquist above 51 Hz");
  Sos sos = butter_bandstop(4, 49.0, 51.0, rec.fs);
  Recording out = rec;
  for (Eigen::Index c = 0; c < rec.n_channels(); ++c)
    out.data.row(c) = filtfilt(sos, rec.data.row(c).transpose()).transpose();
  return out;
}

Recording average_reference(const Recording& rec) {
  if (rec.n_channels() < 2)
    throw Error(ErrorKind::Parameter, "average reference needs at least 2 channels");
  Recording out = rec;
  Eigen::RowVectorXd mean = rec.data.colwise().mean();
  out.data.rowwise() -= mean;
  return out;
}

}  // namespace oscimark
