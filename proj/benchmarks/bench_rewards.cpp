#include <benchmark/benchmark.h>

#include "advpara/constraints.hpp"
#include "advpara/rewards.hpp"
#include "advpara/rng.hpp"
#include "advpara/synthetic.hpp"
#include "advpara/text.hpp"

using namespace advpara;

namespace {

void BM_ParaphraseReward(benchmark::State& state) {
  Rng rng(1);
  double v = 0.0;
  for (auto _ : state) {
    v = 2.0 * rng.uniform() - 1.0;
    benchmark::DoNotOptimize(paraphrase_reward(v, true, 35.0, 10.0));
  }
}
BENCHMARK(BM_ParaphraseReward);

void BM_EvaluateAll(benchmark::State& state) {
  const auto suite = synthetic::suite();
  LabeledExample ex;
  ex.text = "the film was really good";
  ex.char_length = text::char_length(ex.text);
  ex.label = 1;
  ex.victim_probs = suite.victim->predict(ex.text);
  const ConstraintThresholds th;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_all(ex, "this movie is truly great", suite.scorers(), th));
}
BENCHMARK(BM_EvaluateAll);

void BM_UpdateBaselines(benchmark::State& state) {
  std::vector<CandidateSet> sets(static_cast<std::size_t>(state.range(0)));
  Rng rng(2);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    sets[i].original_id = "x" + std::to_string(i);
    sets[i].candidates.resize(48);
    for (auto& c : sets[i].candidates) c.reward = 10.0 * rng.uniform();
  }
  for (auto _ : state) {
    BaselineRegistry reg;
    update_baselines(reg, sets);
    benchmark::DoNotOptimize(reg.size());
  }
}
BENCHMARK(BM_UpdateBaselines)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
