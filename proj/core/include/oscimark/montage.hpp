#pragma once

#include <map>
#include <string>
#include <vector>

namespace oscimark {

// Channel layout plus named region groupings used for region-averaged power.
struct Montage {
  std::vector<std::string> labels;
  // region name -> channel labels (each must exist in labels)
  std::map<std::string, std::vector<std::string>> regions;

  // Throws if labels are not unique or a region references a missing channel.
  void validate() const;

  int index_of(const std::string& label) const;  // -1 if absent
  std::size_t size() const { return labels.size(); }

  // 16-channel 10-20 montage with FP/F/C/P/T regions.
  static Montage standard_16();
};

// All unordered channel pairs (i < j), row-major over the upper triangle.
std::vector<std::pair<int, int>> channel_pairs(std::size_t n_channels);

}  // namespace oscimark
