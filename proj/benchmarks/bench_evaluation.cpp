#include <benchmark/benchmark.h>

#include "advpara/clustering.hpp"
#include "advpara/evaluation.hpp"
#include "advpara/synthetic.hpp"

using namespace advpara;

namespace {

clustering::Points blobs(std::size_t n, std::size_t dims, std::uint64_t seed) {
  Rng rng(seed);
  clustering::Points pts(n, std::vector<double>(dims));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t centre = i % 8;
    for (std::size_t d = 0; d < dims; ++d) pts[i][d] = (d == centre ? 5.0 : 0.0) + 0.1 * rng.uniform();
  }
  return pts;
}

void BM_Hdbscan(benchmark::State& state) {
  const auto pts = blobs(static_cast<std::size_t>(state.range(0)), 10, 1);
  for (auto _ : state) benchmark::DoNotOptimize(clustering::hdbscan(pts, 2, 2, true));
}
BENCHMARK(BM_Hdbscan)->Arg(48)->Arg(256);

void BM_ClusterWithPca(benchmark::State& state) {
  const auto pts = blobs(48, static_cast<std::size_t>(state.range(0)), 2);
  const ClusteringConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(clustering::cluster(pts, cfg));
}
BENCHMARK(BM_ClusterWithPca)->Arg(32)->Arg(384);

void BM_Bootstrap(benchmark::State& state) {
  Rng rng(3);
  std::vector<bool> a(static_cast<std::size_t>(state.range(0))), b(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.index(2);
    b[i] = rng.index(2);
  }
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_test(a, b, 1000, rng));
}
BENCHMARK(BM_Bootstrap)->Arg(100)->Arg(1000);

void BM_EvaluateSplit(benchmark::State& state) {
  const auto suite = synthetic::suite();
  const auto ds = synthetic::dataset(suite, 200, 4);
  RunConfig cfg;
  EvalModels em{suite.paraphraser.get(), suite.victim.get(), suite.scorers(), suite.perplexity.get()};
  const auto dec = DecodingConfig::preset("beam", cfg.n_eval_candidates);
  const auto threads = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_split(ds.splits.test, em, cfg, dec, 0, threads));
}
BENCHMARK(BM_EvaluateSplit)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
