#pragma once

#include <string>
#include <vector>

#include "oscimark/errors.hpp"

namespace oscimark {

struct Band {
  std::string name;
  double lo_hz = 0.0;  // inclusive
  double hi_hz = 0.0;  // exclusive
};

// Named [lo, hi) frequency bands. Broadband spans the whole analysis range
// and overlaps the others by definition.
struct BandSet {
  std::vector<Band> bands;

  const Band& get(const std::string& name) const {
    for (const auto& b : bands)
      if (b.name == name) return b;
    throw Error(ErrorKind::Parameter, "unknown band: " + name);
  }

  bool has(const std::string& name) const {
    for (const auto& b : bands)
      if (b.name == name) return true;
    return false;
  }

  void validate() const {
    for (std::size_t i = 0; i < bands.size(); ++i) {
      if (!(bands[i].lo_hz < bands[i].hi_hz))
        throw Error(ErrorKind::Parameter, "band '" + bands[i].name + "' has lo >= hi");
      for (std::size_t j = i + 1; j < bands.size(); ++j)
        if (bands[i].name == bands[j].name)
          throw Error(ErrorKind::Parameter, "duplicate band name: " + bands[i].name);
    }
  }

  static BandSet standard() {
    return BandSet{{
        {"delta", 0.5, 4.0},
        {"theta", 4.0, 8.0},
        {"alpha", 8.0, 13.0},
        {"beta", 13.0, 30.0},
        {"gamma", 30.0, 40.0},
        {"broadband", 0.5, 40.0},
    }};
  }
};

}  // namespace oscimark
