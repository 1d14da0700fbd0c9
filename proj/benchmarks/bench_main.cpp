#include <benchmark/benchmark.h>

#include "mcnsim/bench.hpp"

using namespace mcnsim;

namespace {

Platform mesh64() { return Platform::uniform({4, 4}, 4, 10.0, 10.0, 1.0, 0.1, 1.0); }

TaskGraph layered64(const Platform& p) {
  WorkloadSpec s = WorkloadSpec::defaults(WorkloadKind::kLayeredRandom);
  s.num_tasks = 64;
  s.seed = 1;
  return generate(s, p);
}

void BM_SelectArm(benchmark::State& state) {
  const auto arms = static_cast<std::size_t>(state.range(0));
  BanditState s(arms, 2.0);
  for (std::size_t j = 0; j < arms; ++j) s.record_reward(j, -static_cast<double>(j % 7));
  for (auto _ : state) benchmark::DoNotOptimize(select_arm(s));
}
BENCHMARK(BM_SelectArm)->Arg(16)->Arg(64)->Arg(256);

void BM_RunMab(benchmark::State& state) {
  const Platform p = mesh64();
  const TaskGraph g = layered64(p);
  MabOptions o;
  o.iterations = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_mab(g, p, o));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 64);
}
BENCHMARK(BM_RunMab)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Execute(benchmark::State& state) {
  const Platform p = mesh64();
  const TaskGraph g = layered64(p);
  const Allocation a = allocate_random(g, p, 3);
  for (auto _ : state) benchmark::DoNotOptimize(execute(a, g, p));
}
BENCHMARK(BM_Execute)->Unit(benchmark::kMicrosecond);

void BM_Generate(benchmark::State& state) {
  WorkloadSpec s = WorkloadSpec::defaults(WorkloadKind::kFineGrained);
  s.num_tasks = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate(s, 256));
}
BENCHMARK(BM_Generate)->Arg(64)->Arg(512)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
