#include "oscimark/montage.hpp"

#include <algorithm>
#include <set>

#include "oscimark/errors.hpp"

namespace oscimark {

void Montage::validate() const {
  if (labels.empty())
    throw Error(ErrorKind::Configuration, "montage has no channels");
  std::set<std::string> seen(labels.begin(), labels.end());
  if (seen.size() != labels.size())
    throw Error(ErrorKind::Configuration, "montage labels are not unique");
  for (const auto& [name, chans] : regions) {
    for (const auto& ch : chans) {
      if (!seen.count(ch))
        throw Error(ErrorKind::Configuration,
                    "region '" + name + "' references unknown channel '" + ch + "'");
    }
  }
}

int Montage::index_of(const std::string& label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

Montage Montage::standard_16() {
  Montage m;
  m.labels = {"Fp1", "Fp2", "F7", "F3", "F4", "F8", "C3", "C4",
              "P3",  "P4",  "T3", "T4", "T5", "T6", "O1", "O2"};
  m.regions = {
      {"FP", {"Fp1", "Fp2"}},
      {"F", {"F7", "F3", "F4", "F8"}},
      {"C", {"C3", "C4"}},
      // P7 does not exist in this montage; the parietal group is P3/P4.
      {"P", {"P3", "P4"}},
      {"T", {"T3", "T4", "T5", "T6"}},
  };
  return m;
}

std::vector<std::pair<int, int>> channel_pairs(std::size_t n_channels) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(n_channels * (n_channels - 1) / 2);
  for (std::size_t i = 0; i < n_channels; ++i)
    for (std::size_t j = i + 1; j < n_channels; ++j)
      pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
  return pairs;
}

}  // namespace oscimark
