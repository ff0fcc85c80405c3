#include "fleetsample/checks.hpp"

#include <algorithm>
#include <numeric>

namespace fleetsample {

std::int64_t expected_interactive_messages(CommMode mode, int n_robot, int passes) {
  const std::int64_t n = n_robot;
  if (mode == CommMode::Broadcast) return (passes + 1) * (n * n - n);
  return (n - 1) + passes * 2 * (n - 1);
}

RoundCheck check_round(std::span<const FleetMember> fleet, const CloudState& cloud, const SolverConfig& cfg,
                       const InteractiveConfig& icfg, CommMode mode, const CheckTolerances& tol) {
  RoundCheck out;
  const int n_robot = static_cast<int>(fleet.size());
  double total_budget = 0.0;
  std::vector<FeasibleDataMatrix> mats;
  std::vector<double> budgets;
  for (const auto& r : fleet) {
    total_budget += r.cache_budget;
    mats.push_back(r.feasible);
    budgets.push_back(r.cache_budget);
  }

  std::vector<Action> greedy;
  for (const auto& r : fleet) greedy.push_back(greedy_action(r, cloud, cfg));
  std::vector<Vector> start;
  for (const auto& a : greedy) start.push_back(a.counts());
  const SolveResult oracle = solve_stacked(mats, cloud, budgets, cfg, start);
  const auto vg = feasible_images(fleet, greedy);
  const auto vo = feasible_images(fleet, oracle.actions);

  MessageTransport transport(mode, n_robot);
  InteractiveConfig forward = icfg;
  forward.order.clear();
  const InteractiveResult inter = interactive_actions(fleet, cloud, transport, cfg, forward);

  InteractiveConfig reversed = icfg;
  reversed.order.resize(fleet.size());
  std::iota(reversed.order.rbegin(), reversed.order.rend(), 0);
  MessageTransport transport_rev(mode, n_robot);
  const InteractiveResult inter_rev = interactive_actions(fleet, cloud, transport_rev, cfg, reversed);

  out.l_lower = lower_bound(cloud, 1, total_budget);
  out.l_oracle = joint_loss(cloud, vo);
  out.l_greedy = joint_loss(cloud, vg);
  out.l_interactive = (cloud.deficit() - inter.total).norm();
  out.gap_bound = greedy_oracle_gap_bound(vg, vo);
  out.sum_order_gap = (inter.total - inter_rev.total).norm();
  out.one_iteration_condition = cloud.deficit().sum() > total_budget;
  out.sweeps = inter.trace.sweeps;
  out.passes = inter.trace.passes;
  out.messages = inter.trace.messages;
  out.expected_messages = expected_interactive_messages(mode, n_robot, inter.trace.passes);
  out.max_oracle_kkt = oracle.kkt_residual;

  out.chain_ok = out.l_lower - tol.chain <= out.l_oracle && out.l_oracle <= out.l_greedy + tol.chain;
  out.gap_ok = out.l_greedy - out.l_oracle <= out.gap_bound + tol.chain;
  out.equivalence_ok = std::abs(out.l_interactive - out.l_oracle) <= tol.equivalence;
  out.one_iteration_ok = !out.one_iteration_condition || out.sweeps == 1;
  out.sum_unique_ok = out.sum_order_gap <= tol.sum_uniqueness;
  out.messages_ok = out.messages == out.expected_messages;
  return out;
}

VerifyReport verify_scenario(const Scenario& scenario, const CheckTolerances& tol) {
  scenario.validate();
  VerifyReport report;
  CloudState cloud(scenario.initial_cloud, scenario.target);
  InteractiveConfig icfg;
  icfg.sweep_threshold = scenario.sweep_threshold;
  icfg.max_sweeps = scenario.max_sweeps;

  for (int round = 1; round <= scenario.rounds; ++round) {
    const auto fleet = build_round_fleet(scenario, round);
    RoundCheck rc = check_round(fleet, cloud, scenario.solver, icfg, scenario.comm_mode, tol);
    report.chain_ok &= rc.chain_ok;
    report.gap_ok &= rc.gap_ok;
    report.equivalence_ok &= rc.equivalence_ok;
    report.one_iteration_ok &= rc.one_iteration_ok;
    report.sum_unique_ok &= rc.sum_unique_ok;
    report.messages_ok &= rc.messages_ok;
    report.rounds.push_back(rc);

    // Advance along the interactive trajectory in expectation.
    MessageTransport transport(scenario.comm_mode, scenario.n_robot);
    const InteractiveResult inter = interactive_actions(fleet, cloud, transport, scenario.solver, icfg);
    std::vector<Vector> uploads;
    for (std::size_t i = 0; i < fleet.size(); ++i) {
      if (scenario.integer_uploads) {
        const auto a_int = integerize_action(inter.actions[i]);
        RngStream unused(0);
        uploads.push_back(realize_upload(a_int, fleet[i].feasible, unused, Realization::Expected));
      } else {
        uploads.push_back(inter.feasible[i]);
      }
    }
    cloud = update_cloud_counts(cloud, uploads);
  }
  return report;
}

}  // namespace fleetsample
