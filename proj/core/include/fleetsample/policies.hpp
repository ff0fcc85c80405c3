#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "fleetsample/model.hpp"
#include "fleetsample/solver.hpp"
#include "fleetsample/transport.hpp"

namespace fleetsample {

enum class PolicyKind { Uniform, Greedy, Oracle, Interactive, LowerBound };

inline constexpr PolicyKind kAllPolicies[] = {PolicyKind::Uniform, PolicyKind::Greedy, PolicyKind::Oracle,
                                              PolicyKind::Interactive, PolicyKind::LowerBound};

std::string_view to_string(PolicyKind kind);
/// Throws UnknownPolicy listing the valid names.
PolicyKind parse_policy(std::string_view name);

/// What a robot brings to an optimization round: its posterior matrix and budget.
struct FleetMember {
  FeasibleDataMatrix feasible;
  double cache_budget = 0.0;
};

struct InteractiveConfig {
  double sweep_threshold = 1e-7;
  int max_sweeps = 100000;
  /// Robot update order; empty means ascending id.
  std::vector<int> order;
  /// Record the global objective after every best-response step.
  bool record_steps = false;
};

struct InteractiveTrace {
  /// Best-response sweeps needed to reach the fixed point. The pass that
  /// confirms no robot moved is folded in, so a run whose first post-sweep check
  /// finds no change (or whose second pass changes nothing) reports 1.
  int sweeps = 0;
  /// Passes actually executed, including the confirming one.
  int passes = 0;
  /// Max over robots of ||v_new - v_old|| for each executed pass.
  std::vector<double> per_sweep_max_change;
  std::int64_t messages = 0;
  /// Objective after the greedy initialization, then after every step (if recorded).
  std::vector<double> step_objectives;
  bool converged = false;
};

struct InteractiveResult {
  std::vector<Action> actions;
  std::vector<Vector> feasible;  // v_i = P_i a_i
  Vector total;                  // aggregate as exchanged between robots
  InteractiveTrace trace;
};

Action uniform_action(std::size_t n_class, double budget);

Action greedy_action(const FleetMember& robot, const CloudState& cloud, const SolverConfig& cfg);

std::vector<Action> oracle_actions(std::span<const FleetMember> fleet, const CloudState& cloud,
                                   const SolverConfig& cfg);

/// Sequential best-response message passing. Each robot starts from its greedy
/// action, shares v_i = P_i a_i through `transport`, then robots take turns
/// solving their own problem with everyone else's shared v held fixed until a
/// full pass moves no v_i by more than the sweep threshold.
///
/// Throws NotConverged after max_sweeps passes.
InteractiveResult interactive_actions(std::span<const FleetMember> fleet, const CloudState& cloud,
                                      MessageTransport& transport, const SolverConfig& cfg,
                                      const InteractiveConfig& icfg = {});

/// Distance from the deficit to the halfspace {v : 1^T v <= n_robot * budget}:
/// max(1^T d - n_robot * budget, 0) / sqrt(n_class). Lower-bounds the oracle loss.
double lower_bound(const CloudState& cloud, int n_robot, double budget);

/// ||sum_i (v_oracle_i - v_greedy_i)||, an upper bound on L_greedy - L_oracle.
double greedy_oracle_gap_bound(std::span<const FeasibleAction> greedy_vs,
                               std::span<const FeasibleAction> oracle_vs);

/// Feasible images of a set of actions.
std::vector<FeasibleAction> feasible_images(std::span<const FleetMember> fleet,
                                            std::span<const Action> actions);

/// ||target - counts - sum_i v_i||
double joint_loss(const CloudState& cloud, std::span<const FeasibleAction> vs);

}  // namespace fleetsample
