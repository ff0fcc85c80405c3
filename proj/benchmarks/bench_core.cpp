#include <benchmark/benchmark.h>

#include <filesystem>

#include "fleetsample/io.hpp"
#include "fleetsample/policies.hpp"
#include "fleetsample/solver.hpp"
#include "test_support.hpp"

using namespace fleetsample;

namespace {

std::vector<FeasibleDataMatrix> matrices(const testing::RandomInstance& inst) {
  std::vector<FeasibleDataMatrix> out;
  for (const auto& r : inst.fleet) out.push_back(r.feasible);
  return out;
}

void BM_ProjectCappedSimplex(benchmark::State& state) {
  RngStream rng(1);
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Vector v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = 10.0 * rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(project_capped_simplex(v, 5.0));
}
BENCHMARK(BM_ProjectCappedSimplex)->Arg(2)->Arg(10)->Arg(100)->Arg(1000);

void BM_SolveSingle(benchmark::State& state) {
  const auto inst = testing::random_instance(7, static_cast<std::size_t>(state.range(0)), 1, 50.0, 1.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_single(inst.fleet[0].feasible, inst.cloud, inst.budget, {}));
}
BENCHMARK(BM_SolveSingle)->Arg(2)->Arg(7)->Arg(20)->Arg(50);

void BM_SolveStacked(benchmark::State& state) {
  const auto inst = testing::random_instance(11, 7, static_cast<int>(state.range(0)), 50.0, 2.0);
  const auto mats = matrices(inst);
  const std::vector<double> budgets(mats.size(), inst.budget);
  for (auto _ : state) benchmark::DoNotOptimize(solve_stacked(mats, inst.cloud, budgets, {}));
}
BENCHMARK(BM_SolveStacked)->Arg(2)->Arg(10)->Arg(20)->Arg(50);

void BM_Interactive(benchmark::State& state, CommMode mode) {
  const auto inst = testing::random_instance(13, 7, static_cast<int>(state.range(0)), 50.0, 2.0);
  std::int64_t passes = 0;
  for (auto _ : state) {
    MessageTransport transport(mode, static_cast<int>(inst.fleet.size()));
    const auto r = interactive_actions(inst.fleet, inst.cloud, transport, {});
    passes = r.trace.passes;
    benchmark::DoNotOptimize(r.total);
  }
  state.counters["passes"] = static_cast<double>(passes);
}
BENCHMARK_CAPTURE(BM_Interactive, broadcast, CommMode::Broadcast)->Arg(2)->Arg(10)->Arg(20);
BENCHMARK_CAPTURE(BM_Interactive, ring, CommMode::Ring)->Arg(2)->Arg(10)->Arg(20);

void BM_RunShippedScenario(benchmark::State& state) {
  const Scenario s = load_scenario_file(std::filesystem::path(FLEETSAMPLE_SCENARIO_DIR) / "skewed_target.json");
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(s).metrics.size());
}
BENCHMARK(BM_RunShippedScenario)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
