#include "oscimark/fft.hpp"

#include <fftw3.h>

#include <mutex>

#include "oscimark/errors.hpp"

namespace oscimark {

namespace {
// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex plan_mutex;
}  // namespace

std::vector<std::complex<double>> rfft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n == 0) throw Error(ErrorKind::Parameter, "rfft of empty signal");
  std::vector<double> in(x);
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_destroy_plan(plan);
  }
  return out;
}

namespace {

std::vector<std::complex<double>> cfft(const std::vector<std::complex<double>>& x, int sign) {
  const std::size_t n = x.size();
  if (n == 0) throw Error(ErrorKind::Parameter, "fft of empty signal");
  std::vector<std::complex<double>> in(x), out(n);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    plan = fftw_plan_dft_1d(static_cast<int>(n),
                            reinterpret_cast<fftw_complex*>(in.data()),
                            reinterpret_cast<fftw_complex*>(out.data()), sign,
                            FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_destroy_plan(plan);
  }
  if (sign == FFTW_BACKWARD)
    for (auto& v : out) v /= static_cast<double>(n);
  return out;
}

}  // namespace

std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& x) {
  return cfft(x, FFTW_FORWARD);
}

std::vector<std::complex<double>> ifft(const std::vector<std::complex<double>>& x) {
  return cfft(x, FFTW_BACKWARD);
}

std::vector<std::complex<double>> analytic_signal(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> spec =
      fft(std::vector<std::complex<double>>(x.begin(), x.end()));
  // one-sided doubling
  const std::size_t half = n / 2;
  for (std::size_t k = 1; k < (n + 1) / 2; ++k) spec[k] *= 2.0;
  if (n % 2 == 0) {
    // Nyquist bin kept as-is
    for (std::size_t k = half + 1; k < n; ++k) spec[k] = 0.0;
  } else {
    for (std::size_t k = half + 1; k < n; ++k) spec[k] = 0.0;
  }
  return ifft(spec);
}

}  // namespace oscimark
