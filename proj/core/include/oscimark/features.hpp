#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "oscimark/bands.hpp"
#include "oscimark/dynfc.hpp"
#include "oscimark/recording.hpp"

namespace oscimark {

enum class FeatureFamily { Power, RegionPower, Coherence, DynFc };

// One column of the design matrix. `locus` is a channel, region, ordered
// "A-B" pair, or "stateN"; `metric` is used by the dynfc family only
// (occ | dwell | trans).
struct FeatureDescriptor {
  FeatureFamily family;
  std::string band;
  std::string locus;
  std::string metric;

  bool operator==(const FeatureDescriptor&) const = default;
};

// Canonical grammar: family.band.locus[.metric], pair loci alphabetical.
std::string feature_name(const FeatureDescriptor& d);
FeatureDescriptor parse_feature_name(const std::string& name);

struct FeatureSpecConfig {
  bool power = true;
  bool region_power = true;
  bool coherence = true;
  bool dynfc = true;
  bool coherence_pooled = false;  // band-pooled coherence estimator
  std::vector<std::string> bands = {"delta", "theta", "alpha", "beta", "gamma", "broadband"};
  std::vector<std::string> dynfc_bands = {"delta", "theta", "alpha", "beta", "broadband"};
  int n_states = 4;
  double window_len_s = 4.0;
  double window_step_s = 1.0;
  int nperseg = 1000;
  double overlap = 0.5;
};

// Ordered feature namespace; the default totals 912:
// 96 power + 36 region power + 720 coherence + 60 dynfc.
struct FeatureSpec {
  std::vector<FeatureDescriptor> descriptors;
  FeatureSpecConfig config;

  std::size_t size() const { return descriptors.size(); }
  std::vector<std::string> names() const;
  std::string hash() const;  // stable digest of the ordered names

  static FeatureSpec build(const Montage& montage, const BandSet& bands,
                           const FeatureSpecConfig& config = {});
};

// Per-band fitted state models required when dynfc features are in the spec.
using StateModelSet = std::map<std::string, StateModel>;

// One value per descriptor in spec order. `rec` must already be preprocessed.
Eigen::VectorXd extract_features(const Recording& rec, const FeatureSpec& spec,
                                 const BandSet& bands,
                                 const StateModelSet* state_models = nullptr);

// The per-band wPLI window embeddings used both to fit the cohort state
// models and to assign a subject's state sequence.
std::vector<Eigen::VectorXd> wpli_window_vectors(const Recording& rec, const Band& band,
                                                 double len_s, double step_s);

}  // namespace oscimark
