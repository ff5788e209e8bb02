#include "oscimark/features.hpp"

#include <algorithm>
#include <sstream>

#include "oscimark/csv.hpp"
#include "oscimark/errors.hpp"
#include "oscimark/welch.hpp"

namespace oscimark {

namespace {

const char* family_tag(FeatureFamily f) {
  switch (f) {
    case FeatureFamily::Power: return "pow";
    case FeatureFamily::RegionPower: return "rpow";
    case FeatureFamily::Coherence: return "coh";
    case FeatureFamily::DynFc: return "dynfc";
  }
  return "?";
}

std::string pair_locus(const std::string& a, const std::string& b) {
  return a < b ? a + "-" + b : b + "-" + a;
}

std::vector<std::string> region_order(const Montage& montage) {
  std::vector<std::string> names;
  for (const auto& [name, chans] : montage.regions) names.push_back(name);
  names.push_back("global");
  return names;
}

}  // namespace

std::string feature_name(const FeatureDescriptor& d) {
  std::string s = std::string(family_tag(d.family)) + "." + d.band + "." + d.locus;
  if (!d.metric.empty()) s += "." + d.metric;
  return s;
}

FeatureDescriptor parse_feature_name(const std::string& name) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = name.find('.', start);
    parts.push_back(pos == std::string::npos ? name.substr(start)
                                             : name.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (parts.size() < 3 || parts.size() > 4)
    throw Error(ErrorKind::Schema, "malformed feature name: " + name);
  FeatureDescriptor d;
  if (parts[0] == "pow")
    d.family = FeatureFamily::Power;
  else if (parts[0] == "rpow")
    d.family = FeatureFamily::RegionPower;
  else if (parts[0] == "coh")
    d.family = FeatureFamily::Coherence;
  else if (parts[0] == "dynfc")
    d.family = FeatureFamily::DynFc;
  else
    throw Error(ErrorKind::Schema, "unknown feature family in: " + name);
  d.band = parts[1];
  d.locus = parts[2];
  if (parts.size() == 4) d.metric = parts[3];
  if ((d.family == FeatureFamily::DynFc) != (parts.size() == 4))
    throw Error(ErrorKind::Schema, "metric field mismatch in feature name: " + name);
  return d;
}

std::vector<std::string> FeatureSpec::names() const {
  std::vector<std::string> out;
  out.reserve(descriptors.size());
  for (const auto& d : descriptors) out.push_back(feature_name(d));
  return out;
}

std::string FeatureSpec::hash() const {
  std::string joined;
  for (const auto& n : names()) {
    joined += n;
    joined += '\n';
  }
  return content_hash(joined);
}

FeatureSpec FeatureSpec::build(const Montage& montage, const BandSet& bands,
                               const FeatureSpecConfig& config) {
  montage.validate();
  bands.validate();
  FeatureSpec spec;
  spec.config = config;

  if (config.power) {
    for (const auto& band : config.bands)
      for (const auto& ch : montage.labels)
        spec.descriptors.push_back({FeatureFamily::Power, band, ch, ""});
  }
  if (config.region_power) {
    for (const auto& band : config.bands)
      for (const auto& region : region_order(montage))
        spec.descriptors.push_back({FeatureFamily::RegionPower, band, region, ""});
  }
  if (config.coherence) {
    auto pairs = channel_pairs(montage.size());
    for (const auto& band : config.bands)
      for (const auto& [i, j] : pairs)
        spec.descriptors.push_back(
            {FeatureFamily::Coherence, band,
             pair_locus(montage.labels[i], montage.labels[j]), ""});
  }
  if (config.dynfc) {
    for (const auto& band : config.dynfc_bands)
      for (int s = 0; s < config.n_states; ++s)
        for (const char* metric : {"occ", "dwell", "trans"})
          spec.descriptors.push_back(
              {FeatureFamily::DynFc, band, "state" + std::to_string(s), metric});
  }

  for (const auto& d : spec.descriptors)
    if (d.family != FeatureFamily::RegionPower && !bands.has(d.band))
      throw Error(ErrorKind::Configuration, "spec references unknown band: " + d.band);
  return spec;
}

std::vector<Eigen::VectorXd> wpli_window_vectors(const Recording& rec, const Band& band,
                                                 double len_s, double step_s) {
  auto windows = sliding_windows(rec, len_s, step_s);
  std::vector<Eigen::VectorXd> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    Eigen::MatrixXcd analytic(rec.n_channels(), w.length);
    for (Eigen::Index c = 0; c < rec.n_channels(); ++c) {
      Eigen::VectorXd seg = rec.data.row(c).segment(w.start, w.length).transpose();
      analytic.row(c) = analytic_phase(seg, band, rec.fs).transpose();
    }
    out.push_back(upper_triangle(wpli_matrix(analytic)));
  }
  return out;
}

Eigen::VectorXd extract_features(const Recording& rec, const FeatureSpec& spec,
                                 const BandSet& bands, const StateModelSet* state_models) {
  const auto& cfg = spec.config;
  bool need_spectra = false, need_dynfc = false;
  for (const auto& d : spec.descriptors) {
    if (d.family == FeatureFamily::DynFc)
      need_dynfc = true;
    else
      need_spectra = true;
  }

  SegmentSpectra spectra;
  PsdEstimate psd;
  if (need_spectra) {
    spectra = compute_segment_spectra(rec, cfg.nperseg, cfg.overlap);
    psd = psd_from_spectra(spectra);
  }

  std::map<std::string, Eigen::VectorXd> band_power_cache;
  std::map<std::string, std::vector<std::pair<std::string, double>>> region_cache;
  std::map<std::string, CoherenceSpectrum> coh_cache;  // keyed by "i:j"
  std::map<std::string, StateMetrics> dynfc_cache;     // keyed by band

  auto channel_power = [&](const std::string& band_name) -> const Eigen::VectorXd& {
    auto it = band_power_cache.find(band_name);
    if (it == band_power_cache.end())
      it = band_power_cache.emplace(band_name, band_power(psd, bands.get(band_name))).first;
    return it->second;
  };

  auto pair_coherence = [&](int i, int j) -> const CoherenceSpectrum& {
    std::string key = std::to_string(i) + ":" + std::to_string(j);
    auto it = coh_cache.find(key);
    if (it == coh_cache.end())
      it = coh_cache.emplace(key, msc_from_spectra(spectra, i, j)).first;
    return it->second;
  };

  auto dynfc_metrics = [&](const std::string& band_name) -> const StateMetrics& {
    auto it = dynfc_cache.find(band_name);
    if (it != dynfc_cache.end()) return it->second;
    if (!state_models)
      throw Error(ErrorKind::Configuration,
                  "dynfc features requested without a fitted state model");
    auto mit = state_models->find(band_name);
    if (mit == state_models->end())
      throw Error(ErrorKind::Configuration,
                  "no state model for band '" + band_name + "'");
    auto vectors = wpli_window_vectors(rec, bands.get(band_name), cfg.window_len_s,
                                       cfg.window_step_s);
    auto labels = assign_states(vectors, mit->second);
    return dynfc_cache.emplace(band_name, state_metrics(labels, mit->second.k)).first->second;
  };

  Eigen::VectorXd out(spec.size());
  for (std::size_t idx = 0; idx < spec.descriptors.size(); ++idx) {
    const auto& d = spec.descriptors[idx];
    switch (d.family) {
      case FeatureFamily::Power: {
        int ch = rec.montage.index_of(d.locus);
        if (ch < 0)
          throw Error(ErrorKind::Configuration, "unknown channel: " + d.locus);
        out[idx] = channel_power(d.band)[ch];
        break;
      }
      case FeatureFamily::RegionPower: {
        auto& cache = region_cache[d.band];
        if (cache.empty()) cache = region_power(channel_power(d.band), rec.montage);
        auto it = std::find_if(cache.begin(), cache.end(),
                               [&](const auto& p) { return p.first == d.locus; });
        if (it == cache.end())
          throw Error(ErrorKind::Configuration, "unknown region: " + d.locus);
        out[idx] = it->second;
        break;
      }
      case FeatureFamily::Coherence: {
        std::size_t dash = d.locus.find('-');
        if (dash == std::string::npos)
          throw Error(ErrorKind::Configuration, "bad pair locus: " + d.locus);
        int a = rec.montage.index_of(d.locus.substr(0, dash));
        int b = rec.montage.index_of(d.locus.substr(dash + 1));
        if (a < 0 || b < 0)
          throw Error(ErrorKind::Configuration, "unknown pair channels: " + d.locus);
        if (a > b) std::swap(a, b);
        if (cfg.coherence_pooled)
          out[idx] = band_coherence_pooled(spectra, a, b, bands.get(d.band));
        else
          out[idx] = band_coherence(pair_coherence(a, b), bands.get(d.band));
        break;
      }
      case FeatureFamily::DynFc: {
        const auto& m = dynfc_metrics(d.band);
        int s = std::stoi(d.locus.substr(5));
        if (d.metric == "occ")
          out[idx] = m.occupancy[s];
        else if (d.metric == "dwell")
          out[idx] = m.mean_dwell[s];
        else if (d.metric == "trans")
          out[idx] = m.transitions[s];
        else
          throw Error(ErrorKind::Configuration, "unknown dynfc metric: " + d.metric);
        break;
      }
    }
  }
  (void)need_dynfc;
  return out;
}

}  // namespace oscimark
