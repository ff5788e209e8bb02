#pragma once

#include <Eigen/Dense>
#include <string>

#include "oscimark/montage.hpp"

namespace oscimark {

// Multichannel EEG record: channels x samples, microvolts.
struct Recording {
  std::string subject_id;
  Montage montage;
  double fs = 0.0;
  Eigen::MatrixXd data;  // rows = channels, cols = samples

  double duration_s() const { return data.cols() / fs; }
  Eigen::Index n_channels() const { return data.rows(); }
  Eigen::Index n_samples() const { return data.cols(); }

  // Enforces the structural invariants (row count, fs, finite samples).
  void validate() const;
};

// CSV loader: first row = channel labels matching montage order, one sample
// per subsequent row. Sidecar "<path>.meta" holds fs and subject_id.
Recording load_recording(const std::string& path, const Montage& montage);

void save_recording(const Recording& rec, const std::string& path);

}  // namespace oscimark
