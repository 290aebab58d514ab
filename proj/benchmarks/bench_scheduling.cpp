#include <benchmark/benchmark.h>

#include "gridflex/baselines.hpp"
#include "gridflex/dynamics.hpp"
#include "gridflex/exact.hpp"
#include "gridflex/heuristic.hpp"
#include "gridflex/workload.hpp"

using namespace gridflex;

namespace {

Scenario scenario(int devices, std::uint64_t seed = 1) {
  GenSpec spec;
  spec.num_devices = devices;
  spec.classes = parse_classes("LLMMH");
  spec.seed = seed;
  return generate(spec).scenario;
}

// One aggregator's slot decision with every request present and unserved.
void BM_ScheduleSlot(benchmark::State& state) {
  const Scenario sc = scenario(static_cast<int>(state.range(0)));
  std::vector<DeviceState> states = initial_states(sc.devices);
  std::vector<const DeviceState*> cluster;
  for (DeviceState& s : states) {
    if (s.request.home == 0) cluster.push_back(&s);
  }
  const SlotIndex t = sc.config.horizon_slots / 2;
  const AggregatorState agg{0, sc.config.budgets_kw[0], 0.0, {}};
  for (auto _ : state) {
    ClusterPlan plan = schedule_slot(agg, cluster, t, sc.config);
    benchmark::DoNotOptimize(plan);
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(cluster.size()));
}
BENCHMARK(BM_ScheduleSlot)->RangeMultiplier(2)->Range(100, 3200)->Complexity(benchmark::oNLogN);

void BM_RunHorizon(benchmark::State& state, SchedulerOptions (*make)()) {
  const Scenario sc = scenario(static_cast<int>(state.range(0)));
  const SchedulerOptions opts = make();
  for (auto _ : state) {
    HorizonResult r = run_horizon(sc.config, sc.devices, opts);
    benchmark::DoNotOptimize(r);
  }
  state.counters["slots"] = sc.config.horizon_slots;
  state.counters["requests"] = static_cast<double>(sc.devices.size());
}
BENCHMARK_CAPTURE(BM_RunHorizon, heuristic, heuristic_options)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_RunHorizon, edf, edf_options)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_RunHorizon, hp, hp_options)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_SolveExact(benchmark::State& state) {
  std::vector<ExactInstance> inst;
  for (std::uint64_t s = 0; s < 16; ++s) {
    const Scenario sc = generate_micro(MicroSpec{.seed = s});
    inst.push_back({sc.id, sc.config, sc.devices, {}});
  }
  std::uint64_t nodes = 0;
  for (auto _ : state) {
    for (const ExactInstance& i : inst) nodes += solve_exact(i).nodes;
  }
  state.counters["nodes/iter"] = benchmark::Counter(static_cast<double>(nodes), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_SolveExact)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
