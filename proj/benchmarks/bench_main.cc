#include <cmath>

#include <benchmark/benchmark.h>

#include "dcs/analysis.h"
#include "dcs/model.h"
#include "dcs/networks.h"
#include "dcs/solver.h"

namespace dcs {
namespace {

RecoveryProblem GaussianProblem(int n, int horizon, bool noisy) {
  GaussianOptions opts;
  opts.a_scale = 1.0 / std::sqrt(static_cast<double>(n));
  const SystemModel sys = GaussianSystem(n, 2 * n, n, 1, opts).sys;
  const SparseInputs u = GenerateSparseInputs(2 * n, horizon, 2, ValueDistribution{}, 2);
  const Trajectory t = Simulate(sys, u.inputs, Vector::Zero(n));
  RecoveryProblem p{sys, t.outputs};
  if (noisy) {
    p.mode = RecoveryMode::kNoisy;
    p.eps_dprime = 0.1;
  }
  return p;
}

void BM_SolveNoiseless(benchmark::State& state) {
  const RecoveryProblem p = GaussianProblem(static_cast<int>(state.range(0)), 5, false);
  for (auto _ : state) benchmark::DoNotOptimize(Solve(p));
}
BENCHMARK(BM_SolveNoiseless)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_SolveNoisy(benchmark::State& state) {
  const RecoveryProblem p = GaussianProblem(static_cast<int>(state.range(0)), 5, true);
  for (auto _ : state) benchmark::DoNotOptimize(Solve(p));
}
BENCHMARK(BM_SolveNoisy)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_SolveSequential(benchmark::State& state) {
  RecoveryProblem p = GaussianProblem(20, 5, false);
  p.strategy = RecoveryStrategy::kSequential;
  for (auto _ : state) benchmark::DoNotOptimize(Solve(p));
}
BENCHMARK(BM_SolveSequential)->Unit(benchmark::kMillisecond);

void BM_RipExact(benchmark::State& state) {
  const SystemModel sys = GaussianSystem(20, 40, 20, 3).sys;
  const int s = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(RipConstant(sys.B(), s, CheckMode::kExact, 10000000));
}
BENCHMARK(BM_RipExact)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_RipSampled(benchmark::State& state) {
  const SystemModel sys = GaussianSystem(50, 100, 50, 3).sys;
  for (auto _ : state) {
    benchmark::DoNotOptimize(RipConstant(sys.B(), 10, CheckMode::kSampled, kDefaultRipSamples, 1));
  }
}
BENCHMARK(BM_RipSampled)->Unit(benchmark::kMillisecond);

void BM_RankConditionSampled(benchmark::State& state) {
  RateNetworkParams params;
  params.p = 30;
  const SystemModel sys = RateNetwork(params).sys;
  for (auto _ : state) {
    benchmark::DoNotOptimize(CheckRankCondition(sys, 10, 4, CheckMode::kSampled, 20, 1));
  }
}
BENCHMARK(BM_RankConditionSampled)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dcs

BENCHMARK_MAIN();
