// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fleetsample/checks.hpp"
#include "fleetsample/io.hpp"
#include "test_support.hpp"

using namespace fleetsample;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

struct RandomScenario {
  fleetsample::testing::RandomInstance inst;
  std::uint64_t seed;
};

// N_class in {2..6}, N_robot in {1..10}, confusions with diagonal >= 0.5,
// Dirichlet true distributions, budget in [2, 20].
RandomScenario general_scenario(std::uint64_t seed, double min_factor, double max_factor) {
  RngStream pick(mix64(seed ^ 0xacce55ull));
  const std::size_t n_class = 2 + static_cast<std::size_t>(pick.next_u64() % 5);
  const int n_robot = 1 + static_cast<int>(pick.next_u64() % 10);
  const double budget = 2.0 + 18.0 * pick.uniform();
  const double factor = min_factor + (max_factor - min_factor) * pick.uniform();
  return {fleetsample::testing::random_instance(seed, n_class, n_robot, budget, factor), seed};
}

std::vector<RandomScenario> criterion1_scenarios() {
  std::vector<RandomScenario> out;
  for (std::uint64_t s = 0; s < 100; ++s) out.push_back(general_scenario(1000 + s, 0.2, 3.0));
  return out;
}

std::vector<RandomScenario> criterion2_scenarios() {
  std::vector<RandomScenario> out;
  for (std::uint64_t s = 0; s < 100; ++s) out.push_back(general_scenario(5000 + s, 2.0, 4.0));
  return out;
}

InteractiveResult interactive(const RandomScenario& sc, CommMode mode, bool record = false) {
  MessageTransport t(mode, static_cast<int>(sc.inst.fleet.size()));
  InteractiveConfig icfg;
  icfg.record_steps = record;
  return interactive_actions(sc.inst.fleet, sc.inst.cloud, t, {}, icfg);
}

double oracle_loss(const RandomScenario& sc) {
  return joint_loss(sc.inst.cloud,
                    feasible_images(sc.inst.fleet, oracle_actions(sc.inst.fleet, sc.inst.cloud, {})));
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int violations = 0;
  for (const auto& sc : criterion1_scenarios()) {
    const InteractiveResult r = interactive(sc, CommMode::Broadcast);
    const double gap = std::abs((sc.inst.cloud.deficit() - r.total).norm() - oracle_loss(sc));
    worst = std::max(worst, gap);
    if (gap > 1e-5) ++violations;
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs <= 60.0,
          fmt("100 scenarios, max |L_int - L_oracle| = %.2e (tol 1e-5), %d violations, %.2f s (limit 60 s)", worst,
              violations, secs)};
}

Outcome criterion2() {
  int violations = 0;
  double worst_second = 0.0;
  std::uint64_t first_bad = 0;
  for (const auto& sc : criterion2_scenarios()) {
    const double deficit = sc.inst.cloud.deficit().sum();
    const double fleet_budget = sc.inst.budget * static_cast<double>(sc.inst.fleet.size());
    if (deficit < 2.0 * fleet_budget) return {false, fmt("generator broke the deficit condition (seed %llu)",
                                                         static_cast<unsigned long long>(sc.seed))};
    const InteractiveResult r = interactive(sc, CommMode::Broadcast);
    const auto& ch = r.trace.per_sweep_max_change;
    const double second = ch.size() >= 2 ? ch[1] : 0.0;
    worst_second = std::max(worst_second, second);
    if (r.trace.sweeps != 1 || second > 1e-6) {
      if (violations == 0) first_bad = sc.seed;
      ++violations;
    }
  }
  return {violations == 0,
          fmt("100 scenarios with 1'd >= 2 N B: %d report more than one sweep (first seed %llu), "
              "max verification-sweep change %.3e (tol 1e-6)",
              violations, static_cast<unsigned long long>(first_bad), worst_second)};
}

Outcome criterion3() {
  int violations = 0;
  int checked = 0;
  double worst_chain = -std::numeric_limits<double>::infinity();
  double worst_gap = -std::numeric_limits<double>::infinity();
  auto check = [&](const RandomScenario& sc) {
    const RoundCheck c = check_round(sc.inst.fleet, sc.inst.cloud, {}, {}, CommMode::Broadcast);
    ++checked;
    const double rounding = 1e-12 * std::max(1.0, c.l_greedy);
    const double chain_excess = std::max(c.l_lower - 1e-6 - c.l_oracle, c.l_oracle - c.l_greedy - rounding);
    const double gap_excess = (c.l_greedy - c.l_oracle) - (c.gap_bound + 1e-6);
    worst_chain = std::max(worst_chain, chain_excess);
    worst_gap = std::max(worst_gap, gap_excess);
    if (chain_excess > 0.0 || gap_excess > 0.0) ++violations;
  };
  for (const auto& sc : criterion1_scenarios()) check(sc);
  for (const auto& sc : criterion2_scenarios()) check(sc);
  return {violations == 0,
          fmt("%d scenarios, %d violations; worst chain excess %.2e, worst gap-bound excess %.2e (both must be <= 0)",
              checked, violations, worst_chain, worst_gap)};
}

Outcome criterion4() {
  int violations = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream rng(mix64(seed + 77));
    const std::size_t n = 2 + static_cast<std::size_t>(rng.next_u64() % 5);
    const int n_robot = 2 + static_cast<int>(rng.next_u64() % 9);
    const FeasibleDataMatrix P = build_feasible_matrix(fleetsample::testing::random_confusion(rng, n),
                                                       fleetsample::testing::random_distribution(rng, n));
    const double budget = 2.0 + 18.0 * rng.uniform();
    const std::vector<FleetMember> fleet(static_cast<std::size_t>(n_robot), FleetMember{P, budget});
    const auto N = static_cast<Eigen::Index>(n);
    const CloudState cloud(Vector::Zero(N), Vector::Constant(N, 4.0 * n_robot * budget / static_cast<double>(n)));
    std::vector<Action> greedy;
    for (const auto& m : fleet) greedy.push_back(greedy_action(m, cloud, {}));
    const double l_greedy = joint_loss(cloud, feasible_images(fleet, greedy));
    const double l_oracle = joint_loss(cloud, feasible_images(fleet, oracle_actions(fleet, cloud, {})));
    worst = std::max(worst, std::abs(l_greedy - l_oracle));
    if (std::abs(l_greedy - l_oracle) > 1e-6) ++violations;
  }
  return {violations == 0, fmt("20 identical fleets (uniform target, empty cloud): max |L_greedy - L_oracle| = "
                               "%.2e (tol 1e-6), %d violations",
                               worst, violations)};
}

Outcome criterion5() {
  std::string detail;
  bool ok = true;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RandomScenario sc{fleetsample::testing::random_instance(9000 + seed, 4, 20, 5.0, seed % 2 ? 2.5 : 0.6),
                      9000 + seed};
    const InteractiveResult b = interactive(sc, CommMode::Broadcast);
    const InteractiveResult r = interactive(sc, CommMode::Ring);
    const std::int64_t Sb = b.trace.passes, Sr = r.trace.passes;
    const bool this_ok = b.trace.messages == (Sb + 1) * 380 && r.trace.messages == 19 + 38 * Sr;
    ok = ok && this_ok;
    detail += fmt("%sS=%lld: broadcast %lld/%lld ring %lld/%lld", seed ? "; " : "", static_cast<long long>(Sb),
                  static_cast<long long>(b.trace.messages), static_cast<long long>((Sb + 1) * 380),
                  static_cast<long long>(r.trace.messages), static_cast<long long>(19 + 38 * Sr));
  }
  return {ok, "N=20, counted/expected: " + detail};
}

Outcome criterion6() {
  const auto t0 = Clock::now();
  double worst_gap = 0.0, worst_kkt = 0.0;
  int instances = 0, violations = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    RngStream rng(mix64(seed + 606));
    const std::size_t n = seed < 20 ? 2 : 3;
    const double budget = static_cast<double>(1 + seed % 5);
    const FeasibleDataMatrix P = build_feasible_matrix(fleetsample::testing::random_confusion(rng, n),
                                                       fleetsample::testing::random_distribution(rng, n));
    // deficits from well inside the reachable set to far beyond the budget
    const double scale = budget * (0.3 + 3.0 * rng.uniform());
    const Vector deficit = scale * rng.dirichlet(n, 1.0);
    const CloudState cloud(Vector::Zero(static_cast<Eigen::Index>(n)), deficit);
    const SolveResult r = solve_single(P, cloud, budget, {});
    const double grid = fleetsample::testing::grid_min_single(P.matrix(), deficit, budget, 0.02);
    const double gap = std::abs(r.objective - grid);
    worst_gap = std::max(worst_gap, gap);
    worst_kkt = std::max(worst_kkt, r.kkt_residual);
    if (gap > 2e-2 || r.kkt_residual > 1e-6) ++violations;
    ++instances;
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RngStream rng(mix64(seed + 707));
    const double budget = static_cast<double>(1 + seed % 2);
    const FeasibleDataMatrix P1 = build_feasible_matrix(fleetsample::testing::random_confusion(rng, 2),
                                                        fleetsample::testing::random_distribution(rng, 2));
    const FeasibleDataMatrix P2 = build_feasible_matrix(fleetsample::testing::random_confusion(rng, 2),
                                                        fleetsample::testing::random_distribution(rng, 2));
    const Vector deficit = 2.0 * budget * (0.3 + 2.0 * rng.uniform()) * rng.dirichlet(2, 1.0);
    const CloudState cloud(Vector::Zero(2), deficit);
    const std::vector<FeasibleDataMatrix> Ps = {P1, P2};
    const std::vector<double> budgets = {budget, budget};
    const SolveResult r = solve_stacked(Ps, cloud, budgets, {});
    const double grid = fleetsample::testing::grid_min_pair(P1.matrix(), P2.matrix(), deficit, budget, 0.02);
    const double gap = std::abs(r.objective - grid);
    worst_gap = std::max(worst_gap, gap);
    worst_kkt = std::max(worst_kkt, r.kkt_residual);
    if (gap > 2e-2 || r.kkt_residual > 1e-6) ++violations;
    ++instances;
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs <= 120.0,
          fmt("%d instances (2/3 classes, budgets <= 5, grid step 0.02): max |obj - grid| = %.2e (tol 2e-2), "
              "max KKT residual %.2e (tol 1e-6), %.2f s (limit 120 s)",
              instances, worst_gap, worst_kkt, secs)};
}

Outcome criterion7() {
  const Scenario base = load_scenario_file(fs::path(FLEETSAMPLE_SCENARIO_DIR) / "adverse_weather.json");
  if (base.n_robot != 10 || base.n_class != 7 || base.rounds != 5)
    return {false, "shipped scenario does not have 10 robots, 7 classes, 5 rounds"};
  double sum_g = 0.0, sum_i = 0.0;
  int worse = 0;
  for (int k = 0; k < 10; ++k) {
    Scenario s = base;
    s.seed = base.seed + static_cast<std::uint64_t>(k);
    s.policy = PolicyKind::Greedy;
    const double g = run_scenario(s).metrics.back().l2_distance;
    s.policy = PolicyKind::Interactive;
    const double i = run_scenario(s).metrics.back().l2_distance;
    sum_g += g;
    sum_i += i;
    if (!(i < g)) ++worse;
  }
  const double improvement = 100.0 * (sum_g - sum_i) / sum_g;
  return {worse == 0 && improvement >= 10.0,
          fmt("10 seeds: mean final L2 greedy %.3f, interactive %.3f; improvement %.1f%% (need >= 10%%); "
              "%d seeds where interactive is not strictly better",
              sum_g / 10, sum_i / 10, improvement, worse)};
}

Outcome criterion8() {
  Scenario s = load_scenario_file(fs::path(FLEETSAMPLE_SCENARIO_DIR) / "skewed_target.json");
  if (s.realization != Realization::Expected) return {false, "shipped skewed-target scenario is not in expected mode"};
  if ((s.target.array() == s.target(0)).all()) return {false, "shipped target is uniform"};
  s.policy = PolicyKind::Interactive;
  const ScenarioResult r = run_scenario(s);
  int increases = 0;
  for (std::size_t k = 1; k < r.metrics.size(); ++k)
    if (r.metrics[k].l2_distance > r.metrics[k - 1].l2_distance) ++increases;
  const double reach = (s.target - s.initial_cloud).sum();
  const double capacity = s.total_budget() * s.rounds;
  const RoundMetrics& last = r.metrics.back();
  const bool close = last.l2_distance <= last.lower_bound + 1e-3;
  return {increases == 0 && close && capacity >= reach,
          fmt("%zu rounds, %d increases; final L2 %.6f vs lower bound %.6f + 1e-3; capacity %.0f for deficit %.0f",
              r.metrics.size() - 1, increases, last.l2_distance, last.lower_bound, capacity, reach)};
}

Outcome criterion9() {
  const fs::path out = fs::temp_directory_path() / "fleetsample_acceptance_determinism";
  fs::remove_all(out);
  const std::string scenario = (fs::path(FLEETSAMPLE_SCENARIO_DIR) / "adverse_weather.json").string();
  std::vector<std::string> files;
  for (const char* run : {"a", "b"}) {
    const std::string cmd = std::string("\"") + FLEETSAMPLE_CLI + "\" run --scenario \"" + scenario +
                            "\" --seed 11 --out-dir \"" + (out / run).string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "cli run failed: " + cmd};
    files.push_back(read_text_file(out / run / "interactive" / "metrics.csv"));
  }
  fs::remove_all(out);
  return {files[0] == files[1] && !files[0].empty(),
          fmt("two CLI runs, %zu bytes each, %s", files[0].size(), files[0] == files[1] ? "identical" : "DIFFERENT")};
}

Outcome criterion10() {
  int violations = 0;
  std::size_t steps = 0;
  double worst = 0.0;
  for (const auto& sc : criterion1_scenarios()) {
    const InteractiveResult r = interactive(sc, CommMode::Broadcast, true);
    const auto& obj = r.trace.step_objectives;
    for (std::size_t k = 1; k < obj.size(); ++k) {
      ++steps;
      worst = std::max(worst, obj[k] - obj[k - 1]);
      if (obj[k] > obj[k - 1] + 1e-9) ++violations;
    }
  }
  return {violations == 0, fmt("%zu best-response steps over 100 scenarios, %d increases beyond 1e-9, largest "
                               "step change %+.2e",
                               steps, violations, worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"interactive matches oracle", criterion1},
      {"one-sweep termination under large deficit", criterion2},
      {"ordering chain and gap bound", criterion3},
      {"identical-fleet collapse", criterion4},
      {"exact message counts at N=20", criterion5},
      {"solver vs grid search and KKT", criterion6},
      {"interactive beats greedy on shipped 10-robot scenario", criterion7},
      {"non-uniform target convergence", criterion8},
      {"CLI determinism", criterion9},
      {"potential monotone per best-response step", criterion10},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s [%2zu] %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
