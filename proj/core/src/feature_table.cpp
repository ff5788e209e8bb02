#include "oscimark/feature_table.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "oscimark/csv.hpp"
#include "oscimark/errors.hpp"

namespace oscimark {

void FeatureTable::validate() const {
  if (values.rows() != static_cast<Eigen::Index>(n_rows()) ||
      values.cols() != static_cast<Eigen::Index>(n_cols()))
    throw Error(ErrorKind::Schema, "feature table shape mismatch");
  if (missing.size() != n_rows())
    throw Error(ErrorKind::Schema, "missing mask shape mismatch");
  for (std::size_t r = 0; r < n_rows(); ++r) {
    if (missing[r].size() != n_cols())
      throw Error(ErrorKind::Schema, "missing mask shape mismatch");
    for (std::size_t c = 0; c < n_cols(); ++c)
      if (!missing[r][c] && !std::isfinite(values(r, c)))
        throw Error(ErrorKind::Data, "non-finite unmasked value in feature table");
  }
}

void write_table(const FeatureTable& table, const std::string& path) {
  table.validate();
  std::ostringstream out;
  out << "subject_id";
  for (const auto& n : table.feature_names) out << ',' << n;
  out << '\n';
  for (std::size_t r = 0; r < table.n_rows(); ++r) {
    out << table.subject_ids[r];
    for (std::size_t c = 0; c < table.n_cols(); ++c) {
      out << ',';
      if (!table.missing[r][c]) out << format_double(table.values(r, c));
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

FeatureTable read_table(const std::string& path,
                        const std::vector<std::string>& expected_names) {
  auto rows = read_csv(path);
  if (rows.empty()) throw Error(ErrorKind::Schema, "empty feature table: " + path);
  const auto& header = rows[0];
  if (header.empty() || header[0] != "subject_id")
    throw Error(ErrorKind::Schema, "feature table must start with subject_id column: " + path);

  FeatureTable table;
  table.feature_names.assign(header.begin() + 1, header.end());
  if (!expected_names.empty() && table.feature_names != expected_names)
    throw Error(ErrorKind::Schema, "feature table header does not match expected spec: " + path);

  const std::size_t n_cols = table.feature_names.size();
  const std::size_t n_rows = rows.size() - 1;
  table.values.resize(n_rows, n_cols);
  table.missing.assign(n_rows, std::vector<bool>(n_cols, false));
  for (std::size_t r = 0; r < n_rows; ++r) {
    const auto& row = rows[r + 1];
    if (row.size() != n_cols + 1)
      throw Error(ErrorKind::Schema, "feature table row " + std::to_string(r + 2) +
                                         " has wrong field count: " + path);
    table.subject_ids.push_back(row[0]);
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (row[c + 1].empty()) {
        table.missing[r][c] = true;
        table.values(r, c) = std::numeric_limits<double>::quiet_NaN();
      } else {
        table.values(r, c) = parse_double(row[c + 1], path);
      }
    }
  }
  table.validate();
  return table;
}

}  // namespace oscimark
