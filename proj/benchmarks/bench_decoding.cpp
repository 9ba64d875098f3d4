#include <benchmark/benchmark.h>

#include "advpara/decoding.hpp"
#include "advpara/synthetic.hpp"

using namespace advpara;

namespace {

const std::string kSentence = "the film was really good";

void BM_NucleusStep(benchmark::State& state) {
  Rng rng(1);
  std::vector<double> logits(static_cast<std::size_t>(state.range(0)));
  for (auto& z : logits) z = 4.0 * rng.uniform() - 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(decoding::nucleus_step(logits, 0.95, 1.15, rng));
}
BENCHMARK(BM_NucleusStep)->Arg(32)->Arg(1024)->Arg(32768);

void BM_Generate(benchmark::State& state, const char* preset) {
  const auto vocab = synthetic::vocabulary();
  const auto gen = synthetic::paraphraser(vocab);
  auto cfg = DecodingConfig::preset(preset, 48);
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(decoding::generate(*gen, kSentence, cfg, 48, rng));
}
BENCHMARK_CAPTURE(BM_Generate, sampling, "sampling");
BENCHMARK_CAPTURE(BM_Generate, beam, "beam");
BENCHMARK_CAPTURE(BM_Generate, dbs_low, "dbs-low");
BENCHMARK_CAPTURE(BM_Generate, dbs_high, "dbs-high");

}  // namespace

BENCHMARK_MAIN();
