// Feature namespace: default spec size and decomposition, the naming
// grammar round trip, extraction determinism, and table serialization.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>

#include "oscimark/errors.hpp"
#include "oscimark/feature_table.hpp"
#include "oscimark/features.hpp"
#include "test_util.hpp"

using namespace oscimark;
using namespace testutil;

namespace {

FeatureSpec default_spec() {
  return FeatureSpec::build(Montage::standard_16(), BandSet::standard());
}

}  // namespace

TEST_CASE("default spec totals 912 = 96 + 36 + 720 + 60") {
  const FeatureSpec spec = default_spec();
  CHECK(spec.size() == 912);

  std::size_t power = 0, region = 0, coherence = 0, dynfc = 0;
  for (const auto& d : spec.descriptors) {
    switch (d.family) {
      case FeatureFamily::Power: ++power; break;
      case FeatureFamily::RegionPower: ++region; break;
      case FeatureFamily::Coherence: ++coherence; break;
      case FeatureFamily::DynFc: ++dynfc; break;
    }
  }
  CHECK(power == 96);       // 16 channels x 6 bands
  CHECK(region == 36);      // (5 regions + global) x 6 bands
  CHECK(coherence == 720);  // C(16,2) = 120 pairs x 6 bands
  CHECK(dynfc == 60);       // 5 bands x 4 states x 3 metrics
}

TEST_CASE("restricting to coherence yields 720 columns") {
  FeatureSpecConfig cfg;
  cfg.power = cfg.region_power = cfg.dynfc = false;
  const FeatureSpec spec = FeatureSpec::build(Montage::standard_16(), BandSet::standard(), cfg);
  CHECK(spec.size() == 720);
}

TEST_CASE("feature_name grammar and pair ordering") {
  CHECK(feature_name({FeatureFamily::Coherence, "beta", "F3-P3", ""}) == "coh.beta.F3-P3");
  CHECK(feature_name({FeatureFamily::RegionPower, "gamma", "FP", ""}) == "rpow.gamma.FP");
  CHECK(feature_name({FeatureFamily::Power, "alpha", "Fp1", ""}) == "pow.alpha.Fp1");
  CHECK(feature_name({FeatureFamily::DynFc, "broadband", "state0", "occ"}) ==
        "dynfc.broadband.state0.occ");
}

TEST_CASE("name <-> descriptor round trip is a bijection over the default spec") {
  const FeatureSpec spec = default_spec();
  std::set<std::string> names;
  for (const auto& d : spec.descriptors) {
    const std::string name = feature_name(d);
    CHECK(names.insert(name).second);  // unique
    CHECK(parse_feature_name(name) == d);
  }
  CHECK(names.size() == spec.size());
}

TEST_CASE("pair loci come out alphabetically ordered regardless of input order") {
  const FeatureSpec spec = default_spec();
  for (const auto& d : spec.descriptors) {
    if (d.family != FeatureFamily::Coherence) continue;
    const auto dash = d.locus.find('-');
    REQUIRE(dash != std::string::npos);
    CHECK(d.locus.substr(0, dash) < d.locus.substr(dash + 1));
  }
}

TEST_CASE("extraction on silence: power features zero, coherence flagged zero") {
  FeatureSpecConfig cfg;
  cfg.dynfc = false;  // silence has no state dynamics worth fitting
  const FeatureSpec spec =
      FeatureSpec::build(Montage::standard_16(), BandSet::standard(), cfg);
  const Recording rec =
      make_recording(Montage::standard_16(), Eigen::MatrixXd::Zero(16, 10500));
  const Eigen::VectorXd v = extract_features(rec, spec, BandSet::standard());
  CHECK(v.size() == static_cast<Eigen::Index>(spec.size()));
  CHECK(v.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("extraction is deterministic") {
  FeatureSpecConfig cfg;
  cfg.dynfc = false;
  const FeatureSpec spec =
      FeatureSpec::build(Montage::standard_16(), BandSet::standard(), cfg);
  const Recording rec =
      make_recording(Montage::standard_16(), gaussian_matrix(16, 10500, 8));
  const Eigen::VectorXd a = extract_features(rec, spec, BandSet::standard());
  const Eigen::VectorXd b = extract_features(rec, spec, BandSet::standard());
  CHECK(a == b);
  CHECK(a.allFinite());
}

TEST_CASE("dynfc features require a fitted state model") {
  const FeatureSpec spec = default_spec();
  const Recording rec =
      make_recording(Montage::standard_16(), gaussian_matrix(16, 10500, 9));
  CHECK_THROWS_AS(extract_features(rec, spec, BandSet::standard(), nullptr), Error);
}

TEST_CASE("feature table round-trips bit-exactly through CSV") {
  FeatureTable table;
  table.subject_ids = {"s01", "s02", "s03"};
  table.feature_names = {"pow.alpha.Fp1", "coh.beta.F3-P3", "rpow.gamma.FP"};
  table.values = gaussian_matrix(3, 3, 77);
  table.values(1, 2) = 1.0 / 3.0;       // a value with no short decimal form
  table.values(2, 0) = 1e-17;
  table.missing.assign(3, std::vector<bool>(3, false));

  const std::string dir = scratch_dir("registry_table");
  write_table(table, dir + "/t.csv");
  const FeatureTable back = read_table(dir + "/t.csv", table.feature_names);
  CHECK(back.subject_ids == table.subject_ids);
  CHECK(back.values == table.values);  // 17-significant-digit round trip
}

TEST_CASE("missing cells serialize as empty fields and read back as missing") {
  FeatureTable table;
  table.subject_ids = {"s01", "s02"};
  table.feature_names = {"a", "b"};
  table.values = Eigen::MatrixXd::Constant(2, 2, 1.5);
  table.missing.assign(2, std::vector<bool>(2, false));
  table.missing[0][1] = true;
  table.values(0, 1) = std::numeric_limits<double>::quiet_NaN();

  const std::string dir = scratch_dir("registry_missing");
  write_table(table, dir + "/t.csv");
  const FeatureTable back = read_table(dir + "/t.csv");
  CHECK(back.missing[0][1]);
  CHECK_FALSE(back.missing[1][1]);
  CHECK(back.values(1, 1) == 1.5);
}

TEST_CASE("reordered header is a schema error") {
  FeatureTable table;
  table.subject_ids = {"s01"};
  table.feature_names = {"a", "b"};
  table.values = Eigen::MatrixXd::Zero(1, 2);
  table.missing.assign(1, std::vector<bool>(2, false));

  const std::string dir = scratch_dir("registry_schema");
  write_table(table, dir + "/t.csv");
  CHECK_THROWS_AS(read_table(dir + "/t.csv", {"b", "a"}), Error);
}

TEST_CASE("spec hash is stable across rebuilds and sensitive to config") {
  const FeatureSpec a = default_spec();
  const FeatureSpec b = default_spec();
  CHECK(a.hash() == b.hash());

  FeatureSpecConfig cfg;
  cfg.dynfc = false;
  const FeatureSpec c = FeatureSpec::build(Montage::standard_16(), BandSet::standard(), cfg);
  CHECK(a.hash() != c.hash());
}
