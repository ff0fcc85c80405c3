#pragma once

#include <string>
#include <vector>

#include "fleetsample/policies.hpp"
#include "fleetsample/simulation.hpp"

namespace fleetsample {

struct CheckTolerances {
  /// Slack on lower_bound <= L_oracle <= L_greedy and on the gap bound.
  double chain = 1e-6;
  /// |L_interactive - L_oracle|
  double equivalence = 1e-5;
  /// ||sum v (order A) - sum v (order B)||
  double sum_uniqueness = 1e-5;
};

/// Every policy evaluated on one cloud state, plus the verdicts tying them together.
struct RoundCheck {
  double l_lower = 0.0;
  double l_oracle = 0.0;
  double l_greedy = 0.0;
  double l_interactive = 0.0;
  double gap_bound = 0.0;
  double sum_order_gap = 0.0;
  /// 1^T (target - counts) > total budget
  bool one_iteration_condition = false;
  int sweeps = 0;
  int passes = 0;
  std::int64_t messages = 0;
  std::int64_t expected_messages = 0;
  double max_oracle_kkt = 0.0;

  bool chain_ok = false;
  bool gap_ok = false;
  bool equivalence_ok = false;
  bool one_iteration_ok = false;
  bool sum_unique_ok = false;
  bool messages_ok = false;

  bool all_ok() const {
    return chain_ok && gap_ok && equivalence_ok && one_iteration_ok && sum_unique_ok && messages_ok;
  }
};

/// Messages a full interactive run should cost for `passes` executed sweeps.
std::int64_t expected_interactive_messages(CommMode mode, int n_robot, int passes);

RoundCheck check_round(std::span<const FleetMember> fleet, const CloudState& cloud, const SolverConfig& cfg,
                       const InteractiveConfig& icfg, CommMode mode, const CheckTolerances& tol = {});

struct VerifyReport {
  std::vector<RoundCheck> rounds;
  bool chain_ok = true;
  bool gap_ok = true;
  bool equivalence_ok = true;
  bool one_iteration_ok = true;
  bool sum_unique_ok = true;
  bool messages_ok = true;

  bool all_ok() const {
    return chain_ok && gap_ok && equivalence_ok && one_iteration_ok && sum_unique_ok && messages_ok;
  }
};

/// Follows the scenario's Interactive trajectory (expected realization) and
/// runs check_round on the cloud state before every round.
VerifyReport verify_scenario(const Scenario& scenario, const CheckTolerances& tol = {});

}  // namespace fleetsample
