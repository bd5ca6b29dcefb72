#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "rhc/grpo.hpp"
#include "rhc/metrics.hpp"
#include "rhc/rewards.hpp"
#include "rhc/rng.hpp"
#include "rhc/trace.hpp"

namespace rhc {
namespace {

SyntheticTask MakeTask(std::size_t justification_words) {
  SyntheticTaskSpec spec;
  spec.justification_words = justification_words;
  spec.seed = 11;
  return SyntheticTask::Make(spec);
}

std::vector<std::size_t> WrongLeaf(const SyntheticTask& task, std::size_t feature) {
  auto d = task.gold_index[feature];
  d.back() = (d.back() + 1) % task.spec.branching;
  return d;
}

void BM_ParseTrace(benchmark::State& state) {
  const SyntheticTask task = MakeTask(static_cast<std::size_t>(state.range(0)));
  const std::string raw = task.RenderTrace(0, task.gold_index[0]);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ParseTrace(raw, task.level_names, ParseMode::kStrict));
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * raw.size()));
}
BENCHMARK(BM_ParseTrace)->Arg(10)->Arg(40)->Arg(160);

void BM_ScoreOutput(benchmark::State& state) {
  const SyntheticTask task = MakeTask(40);
  const std::string raw = task.RenderTrace(1, WrongLeaf(task, 1));
  const auto weights = LevelWeights(task.taxonomy);
  const RewardConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ScoreOutput(raw, task.gold[1], task.level_names, cfg, weights));
  }
}
BENCHMARK(BM_ScoreOutput);

void BM_GrpoLoss(benchmark::State& state) {
  SyntheticTaskSpec spec;
  spec.branching = static_cast<std::size_t>(state.range(0));
  spec.seed = 11;
  const SyntheticTask task = SyntheticTask::Make(spec);
  PolicyParams policy = task.ZeroPolicy();
  Rng rng(3);
  for (double& x : policy.data()) x = rng.Uniform(-1.0, 1.0);
  TrainConfig cfg;
  RolloutGroup group = SampleGroup(policy, 0, cfg.group_size, 5);
  std::vector<double> rewards;
  for (std::size_t k = 0; k < group.trajectories.size(); ++k) rewards.push_back(k % 3 ? 0.2 : 1.0);
  group.advantages = GroupAdvantages(rewards);
  const PolicyParams ref = task.ZeroPolicy();
  for (auto _ : state) {
    benchmark::DoNotOptimize(GrpoLoss(group, policy, policy, ref, cfg));
  }
}
BENCHMARK(BM_GrpoLoss)->Arg(4)->Arg(6)->Arg(8);

void BM_Evaluate(benchmark::State& state) {
  const SyntheticTask task = MakeTask(10);
  Rng rng(9);
  std::vector<EvalRecord> records;
  for (int64_t i = 0; i < state.range(0); ++i) {
    const std::size_t f = rng.UniformInt(task.features());
    EvalRecord r;
    r.doc_id = std::to_string(i);
    r.gold = task.gold[f];
    if (rng.UniformInt(10) != 0) {
      r.predicted = rng.UniformInt(3) ? task.gold[f] : task.gold[rng.UniformInt(task.features())];
    }
    records.push_back(std::move(r));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(Evaluate(records, task.taxonomy));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Evaluate)->Arg(1000)->Arg(25000);

}  // namespace
}  // namespace rhc

BENCHMARK_MAIN();
