#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "oscimark/dynfc.hpp"
#include "oscimark/elastic_net.hpp"
#include "oscimark/filters.hpp"
#include "oscimark/montage.hpp"
#include "oscimark/pipeline.hpp"
#include "oscimark/recording.hpp"
#include "oscimark/rng.hpp"
#include "oscimark/svr.hpp"
#include "oscimark/welch.hpp"

using namespace oscimark;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

Recording random_recording(double seconds, std::uint64_t seed) {
  Recording rec;
  rec.montage = Montage::standard_16();
  rec.fs = 500.0;
  rec.subject_id = "bench";
  rec.data = random_matrix(16, static_cast<Eigen::Index>(seconds * rec.fs), seed);
  return rec;
}

}  // namespace

static void BM_WelchPsd(benchmark::State& state) {
  const Recording rec = random_recording(static_cast<double>(state.range(0)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(welch_psd(rec));
  }
}
BENCHMARK(BM_WelchPsd)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_MscCoherence(benchmark::State& state) {
  const Recording rec = random_recording(30.0, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(msc_coherence(rec, 0, 9));
  }
}
BENCHMARK(BM_MscCoherence)->Unit(benchmark::kMillisecond);

static void BM_BandpassFilter(benchmark::State& state) {
  const Recording rec = random_recording(30.0, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bandpass_filter(rec, 0.5, 40.0));
  }
}
BENCHMARK(BM_BandpassFilter)->Unit(benchmark::kMillisecond);

static void BM_WpliWindows(benchmark::State& state) {
  const Recording rec = random_recording(30.0, 4);
  const Band alpha{"alpha", 8.0, 13.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(wpli_window_vectors(rec, alpha, 4.0, 1.0));
  }
}
BENCHMARK(BM_WpliWindows)->Unit(benchmark::kMillisecond);

static void BM_ClusterStates(benchmark::State& state) {
  std::vector<Eigen::VectorXd> points;
  const Eigen::MatrixXd raw = random_matrix(1350, 120, 5);
  for (Eigen::Index i = 0; i < raw.rows(); ++i) points.push_back(raw.row(i).transpose());
  for (auto _ : state) {
    benchmark::DoNotOptimize(cluster_states(points, 4, 9));
  }
}
BENCHMARK(BM_ClusterStates)->Unit(benchmark::kMillisecond);

static void BM_ElasticNet(benchmark::State& state) {
  const Eigen::MatrixXd X = random_matrix(40, state.range(0), 6);
  const Eigen::VectorXd y = random_matrix(40, 1, 7);
  ElasticNetConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(elastic_net_fit(X, y, cfg));
  }
}
BENCHMARK(BM_ElasticNet)->Arg(100)->Arg(912)->Unit(benchmark::kMillisecond);

static void BM_SvrFit(benchmark::State& state) {
  const Eigen::MatrixXd X = random_matrix(40, static_cast<Eigen::Index>(state.range(0)), 8);
  Eigen::VectorXd y = X.col(0) + 0.1 * random_matrix(40, 1, 9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(svr_fit(X, y, 10.0, 0.1));
  }
}
BENCHMARK(BM_SvrFit)->Arg(2)->Arg(8)->Unit(benchmark::kMicrosecond);

static void BM_NestedCv(benchmark::State& state) {
  const Eigen::MatrixXd X = random_matrix(50, 200, 10);
  Eigen::VectorXd y = X.col(3) + 0.2 * random_matrix(50, 1, 11);
  FeatureTable table;
  table.values = X;
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    table.feature_names.push_back("f" + std::to_string(j));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    table.subject_ids.push_back("s" + std::to_string(i));
    table.missing.emplace_back(static_cast<std::size_t>(X.cols()), false);
  }
  PipelineConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nested_cv(table, y, cfg, 1));
  }
}
BENCHMARK(BM_NestedCv)->Unit(benchmark::kMillisecond)->Iterations(3);

BENCHMARK_MAIN();
