#include <benchmark/benchmark.h>

#include "lotsizing/bench.hpp"
#include "lotsizing/formulation.hpp"
#include "lotsizing/heuristic.hpp"
#include "lotsizing/instgen.hpp"
#include "lotsizing/mip/branch_and_bound.hpp"
#include "lotsizing/validate.hpp"

namespace {

using namespace lotsizing;

Instance desk(int retailers, int horizon) {
  GenSpec g;
  g.num_retailers = retailers;
  g.num_warehouses = 2;
  g.horizon = horizon;
  g.plant_capacity_factor = 1.5;
  g.seed = 7;
  return generate(g);
}

void BM_Generate(benchmark::State& state) {
  GenSpec g;
  g.num_retailers = static_cast<int>(state.range(0));
  g.num_warehouses = 5;
  g.horizon = 15;
  for (auto _ : state) benchmark::DoNotOptimize(generate(g));
}
BENCHMARK(BM_Generate)->Arg(50)->Arg(200);

void BM_BuildEchelon(benchmark::State& state) {
  const Instance inst = desk(static_cast<int>(state.range(0)), 15);
  for (auto _ : state) benchmark::DoNotOptimize(build_echelon(inst));
}
BENCHMARK(BM_BuildEchelon)->Arg(10)->Arg(25);

void BM_RootLp(benchmark::State& state) {
  const Instance inst = desk(static_cast<int>(state.range(0)), 15);
  const auto kind = state.range(1) ? FormulationKind::kEchelon : FormulationKind::kStandard;
  const mip::MipModel model = build_model(inst, kind);
  for (auto _ : state) benchmark::DoNotOptimize(mip::solve_lp(model, {}));
}
BENCHMARK(BM_RootLp)->Args({10, 0})->Args({10, 1})->Args({25, 1})->Unit(benchmark::kMillisecond);

void BM_EnumerateTiny(benchmark::State& state) {
  const std::vector<Instance> tiny = tiny_instances(4, 1);
  for (auto _ : state) {
    for (const Instance& inst : tiny) benchmark::DoNotOptimize(exact_optimum_enumerate(inst));
  }
}
BENCHMARK(BM_EnumerateTiny)->Unit(benchmark::kMillisecond);

void BM_HybridDesk(benchmark::State& state) {
  const Instance inst = desk(10, 6);
  HeuristicParams p = HeuristicParams::for_budget(2);
  p.work_units_per_second = kDefaultWorkRate;
  for (auto _ : state) benchmark::DoNotOptimize(hybrid(inst, p));
}
BENCHMARK(BM_HybridDesk)->Unit(benchmark::kMillisecond);

void BM_CheckFeasibility(benchmark::State& state) {
  const Instance inst = desk(25, 15);
  const Solution plan = *all_setups_plan(inst);
  for (auto _ : state) benchmark::DoNotOptimize(check_feasibility(inst, plan));
}
BENCHMARK(BM_CheckFeasibility);

}  // namespace

BENCHMARK_MAIN();
