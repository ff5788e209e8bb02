#include "oscimark/recording.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "oscimark/csv.hpp"
#include "oscimark/errors.hpp"

namespace oscimark {

void Recording::validate() const {
  montage.validate();
  if (data.rows() != static_cast<Eigen::Index>(montage.size()))
    throw Error(ErrorKind::Schema, "channel count does not match montage");
  if (!(fs > 0)) throw Error(ErrorKind::Parameter, "sampling rate must be positive");
  if (!data.allFinite())
    throw Error(ErrorKind::Data, "recording contains non-finite samples: " + subject_id);
}

Recording load_recording(const std::string& path, const Montage& montage) {
  auto rows = read_csv(path);
  if (rows.size() < 2) throw Error(ErrorKind::Schema, "EEG CSV has no data rows: " + path);

  const auto& header = rows[0];
  if (header.size() != montage.size()) {
    throw Error(ErrorKind::Schema,
                "montage mismatch: expected " + std::to_string(montage.size()) +
                    " channels, file has " + std::to_string(header.size()) + ": " + path);
  }
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] != montage.labels[c])
      throw Error(ErrorKind::Schema, "montage mismatch at column " + std::to_string(c) +
                                         ": expected '" + montage.labels[c] + "', got '" +
                                         header[c] + "'");
  }

  Recording rec;
  rec.montage = montage;
  const std::size_t n_ch = montage.size();
  const std::size_t n_samp = rows.size() - 1;
  rec.data.resize(n_ch, n_samp);
  for (std::size_t r = 0; r < n_samp; ++r) {
    const auto& row = rows[r + 1];
    if (row.size() != n_ch)
      throw Error(ErrorKind::Schema, "row " + std::to_string(r + 2) + " has " +
                                         std::to_string(row.size()) + " fields: " + path);
    for (std::size_t c = 0; c < n_ch; ++c) {
      double v = parse_double(row[c], path + " row " + std::to_string(r + 2));
      if (!std::isfinite(v))
        throw Error(ErrorKind::Data, "non-finite sample at row " + std::to_string(r + 2) +
                                         ": " + path);
      rec.data(c, r) = v;
    }
  }

  for (const auto& [k, v] : read_kv(path + ".meta")) {
    if (k == "fs")
      rec.fs = parse_double(v, path + ".meta fs");
    else if (k == "subject_id")
      rec.subject_id = v;
  }
  if (!(rec.fs > 0))
    throw Error(ErrorKind::Schema, "missing or invalid fs in sidecar: " + path + ".meta");
  rec.validate();
  return rec;
}

void save_recording(const Recording& rec, const std::string& path) {
  std::ostringstream out;
  for (std::size_t c = 0; c < rec.montage.size(); ++c) {
    if (c) out << ',';
    out << rec.montage.labels[c];
  }
  out << '\n';
  for (Eigen::Index s = 0; s < rec.n_samples(); ++s) {
    for (Eigen::Index c = 0; c < rec.n_channels(); ++c) {
      if (c) out << ',';
      out << format_double(rec.data(c, s));
    }
    out << '\n';
  }
  write_text_file(path, out.str());
  std::ostringstream meta;
  meta << "fs=" << format_double(rec.fs) << "\n";
  meta << "subject_id=" << rec.subject_id << "\n";
  write_text_file(path + ".meta", meta.str());
}

}  // namespace oscimark
