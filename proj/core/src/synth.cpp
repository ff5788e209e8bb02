#include "oscimark/synth.hpp"

#include <cmath>
#include <complex>
#include <filesystem>
#include <sstream>

#include "oscimark/csv.hpp"
#include "oscimark/errors.hpp"
#include "oscimark/fft.hpp"
#include "oscimark/filters.hpp"
#include "oscimark/rng.hpp"

namespace oscimark {

void SynthConfig::validate() const {
  montage.validate();
  bands.validate();
  if (n_subjects < 1) throw Error(ErrorKind::Configuration, "n_subjects must be >= 1");
  if (!(fs > 0) || !(duration_s > 0))
    throw Error(ErrorKind::Configuration, "fs and duration must be positive");
  if (outcome_weights.size() != couplings.size())
    throw Error(ErrorKind::Configuration, "one outcome weight per planted coupling required");
  if (!(outcome_noise_std >= 0))
    throw Error(ErrorKind::Configuration, "outcome noise std must be >= 0");
  for (const auto& c : couplings) {
    if (!(c.strength >= 0 && c.strength <= 1))
      throw Error(ErrorKind::Configuration, "coupling strength must be in [0, 1]");
    const Band& b = bands.get(c.band);
    if (!(b.lo_hz > 0 && b.hi_hz < fs / 2.0))
      throw Error(ErrorKind::Configuration,
                  "planted band '" + c.band + "' outside (0, fs/2)");
    if (montage.index_of(c.ch_a) < 0 || montage.index_of(c.ch_b) < 0)
      throw Error(ErrorKind::Configuration, "planted coupling references unknown channel");
  }
}

namespace {

double gauss(std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  return d(rng);
}

// Pink (1/f) noise via spectral shaping, normalized to unit variance.
Eigen::VectorXd pink_noise(int n, double fs, std::mt19937_64& rng) {
  std::vector<std::complex<double>> spec(n, {0.0, 0.0});
  for (int k = 1; k <= n / 2; ++k) {
    double f = k * fs / n;
    double amp = 1.0 / std::sqrt(std::max(f, 0.5));
    std::complex<double> v(gauss(rng) * amp, gauss(rng) * amp);
    spec[k] = v;
    if (k != n - k) spec[n - k] = std::conj(v);
  }
  auto x = ifft(spec);
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = x[i].real();
  double sd = std::sqrt(out.squaredNorm() / n - std::pow(out.mean(), 2));
  if (sd > 0) out = (out.array() - out.mean()) / sd;
  return out;
}

Eigen::VectorXd band_noise(int n, double fs, const Band& band, std::mt19937_64& rng) {
  Eigen::VectorXd white(n);
  for (int i = 0; i < n; ++i) white[i] = gauss(rng);
  Sos sos = butter_bandpass(4, band.lo_hz, band.hi_hz, fs);
  Eigen::VectorXd x = filtfilt(sos, white);
  double sd = std::sqrt(x.squaredNorm() / n - std::pow(x.mean(), 2));
  if (sd > 0) x = (x.array() - x.mean()) / sd;
  return x;
}

}  // namespace

SynthCohort generate_cohort(const SynthConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(std::lround(cfg.duration_s * cfg.fs));
  const int n_ch = static_cast<int>(cfg.montage.size());

  SynthCohort cohort;
  cohort.config = cfg;
  cohort.subjects.resize(cfg.n_subjects);

  for (int s = 0; s < cfg.n_subjects; ++s) {
    auto rng = make_rng(child_seed(cfg.master_seed, static_cast<std::uint64_t>(s)));
    SynthSubject& subj = cohort.subjects[s];
    subj.recording.subject_id = "sub" + std::to_string(s);
    subj.recording.montage = cfg.montage;
    subj.recording.fs = cfg.fs;
    subj.recording.data.resize(n_ch, n);
    for (int c = 0; c < n_ch; ++c)
      subj.recording.data.row(c) = pink_noise(n, cfg.fs, rng).transpose();

    subj.outcome = 0.0;
    for (std::size_t ci = 0; ci < cfg.couplings.size(); ++ci) {
      const auto& coupling = cfg.couplings[ci];
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      double gain = coupling.strength * uni(rng);
      subj.gains.push_back(gain);
      subj.outcome += cfg.outcome_weights[ci] * gain;

      const Band& band = cfg.bands.get(coupling.band);
      Eigen::VectorXd shared = band_noise(n, cfg.fs, band, rng);
      Eigen::VectorXd ind_a = band_noise(n, cfg.fs, band, rng);
      Eigen::VectorXd ind_b = band_noise(n, cfg.fs, band, rng);
      int a = cfg.montage.index_of(coupling.ch_a);
      int b = cfg.montage.index_of(coupling.ch_b);
      double cs = std::sqrt(gain), ns = std::sqrt(1.0 - gain);
      subj.recording.data.row(a) +=
          cfg.injection_gain * (cs * shared + ns * ind_a).transpose();
      subj.recording.data.row(b) +=
          cfg.injection_gain * (cs * shared + ns * ind_b).transpose();
    }
    subj.outcome += cfg.outcome_noise_std * gauss(rng);
  }
  return cohort;
}

void write_cohort(const SynthCohort& cohort, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  std::ostringstream manifest;
  manifest << "subject_id,group,eeg_path,panss_fsns_t0,panss_fsns_t1\n";
  std::ostringstream truth;
  truth << "spec_version=1\n";
  truth << "master_seed=" << cohort.config.master_seed << "\n";
  for (std::size_t ci = 0; ci < cohort.config.couplings.size(); ++ci) {
    const auto& c = cohort.config.couplings[ci];
    truth << "coupling" << ci << "=" << c.ch_a << "-" << c.ch_b << "." << c.band
          << " strength=" << format_double(c.strength)
          << " weight=" << format_double(cohort.config.outcome_weights[ci]) << "\n";
  }

  // Endpoints encode the outcome: fixed T0=35, T1 chosen so that
  // (T0-T1)/(T0-7) rounds to the generative outcome.
  const double t0 = 35.0;
  for (const auto& subj : cohort.subjects) {
    std::string csv_name = subj.recording.subject_id + ".csv";
    save_recording(subj.recording, dir + "/" + csv_name);
    double t1 = std::clamp(std::round(t0 - subj.outcome * (t0 - 7.0)), 7.0, 49.0);
    manifest << subj.recording.subject_id << ",active," << csv_name << ","
             << format_double(t0) << "," << format_double(t1) << "\n";
    truth << "subject." << subj.recording.subject_id
          << ".outcome=" << format_double(subj.outcome) << "\n";
    for (std::size_t ci = 0; ci < subj.gains.size(); ++ci)
      truth << "subject." << subj.recording.subject_id << ".gain" << ci << "="
            << format_double(subj.gains[ci]) << "\n";
  }
  write_text_file(dir + "/manifest.csv", manifest.str());
  write_text_file(dir + "/ground_truth.txt", truth.str());
}

}  // namespace oscimark
