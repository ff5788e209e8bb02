#include <cmath>

#include "oscimark/dynfc.hpp"
#include "oscimark/errors.hpp"
#include "oscimark/fft.hpp"
#include "oscimark/filters.hpp"

namespace oscimark {

std::vector<Window> sliding_windows(const Recording& rec, double len_s, double step_s) {
  if (!(len_s > 0) || !(step_s > 0))
    throw Error(ErrorKind::Parameter, "window length and step must be positive");
  const Eigen::Index len = static_cast<Eigen::Index>(std::lround(len_s * rec.fs));
  const Eigen::Index step = static_cast<Eigen::Index>(std::lround(step_s * rec.fs));
  if (rec.n_samples() < len)
    throw Error(ErrorKind::InsufficientData,
                "recording shorter than one window (" + std::to_string(rec.n_samples()) +
                    " < " + std::to_string(len) + " samples)");
  std::vector<Window> out;
  for (Eigen::Index start = 0; start + len <= rec.n_samples(); start += step)
    out.push_back({start, len});
  return out;
}

Eigen::VectorXcd analytic_phase(const Eigen::VectorXd& window, const Band& band, double fs) {
  if (!(band.lo_hz > 0 && band.lo_hz < band.hi_hz && band.hi_hz < fs / 2.0))
    throw Error(ErrorKind::Parameter,
                "band '" + band.name + "' outside (0, fs/2) for analytic signal");
  Sos sos = butter_bandpass(4, band.lo_hz, band.hi_hz, fs);
  Eigen::VectorXd filtered = filtfilt(sos, window);
  std::vector<double> x(filtered.data(), filtered.data() + filtered.size());
  auto a = analytic_signal(x);
  Eigen::VectorXcd out(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) out[static_cast<Eigen::Index>(i)] = a[i];
  return out;
}

}  // namespace oscimark
