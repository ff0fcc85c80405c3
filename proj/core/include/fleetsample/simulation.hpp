#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "fleetsample/model.hpp"
#include "fleetsample/policies.hpp"
#include "fleetsample/rng.hpp"
#include "fleetsample/solver.hpp"
#include "fleetsample/transport.hpp"

namespace fleetsample {

enum class Realization { Expected, Sampled };

std::string_view to_string(Realization r);
std::string_view to_string(EstimationMode m);
Realization parse_realization(std::string_view name);
EstimationMode parse_estimation_mode(std::string_view name);

struct Scenario {
  std::size_t n_class = 0;
  int n_robot = 0;
  int rounds = 0;
  Vector target;
  Vector initial_cloud;
  std::vector<RobotProfile> robots;
  PolicyKind policy = PolicyKind::Interactive;
  CommMode comm_mode = CommMode::Broadcast;
  std::uint64_t seed = 0;
  EstimationMode estimation = EstimationMode::GroundTruth;
  Realization realization = Realization::Sampled;
  SolverConfig solver;
  double sweep_threshold = 1e-7;
  int max_sweeps = 100000;
  /// Round uploads to whole data-points before realizing them. Turning this off
  /// keeps the continuous optimum, which is what the convergence results describe.
  bool integer_uploads = true;
  /// Optional per-round confusion matrices, [round - 1][robot]. Rounds past the
  /// end of the schedule reuse its last entry; empty means each robot's own.
  std::vector<std::vector<ConfusionMatrix>> confusion_schedule;

  void validate() const;
  const ConfusionMatrix& confusion_for(int robot, int round) const;
  double total_budget() const;
};

struct RoundMetrics {
  int round = 0;
  double l2_distance = 0.0;
  /// Best distance any policy could reach this round; equals l2_distance on round 0.
  double lower_bound = 0.0;
  std::int64_t cumulative_messages = 0;
  Vector per_class_cloud_counts;
  int sweeps = 0;
};

struct ScenarioResult {
  std::vector<RoundMetrics> metrics;
  CloudState final_cloud;
};

struct Observations {
  std::vector<int> true_labels;
  std::vector<int> predicted_labels;
};

/// Draws obs_per_round true labels from the robot's class distribution and
/// passes each through its confusion row.
Observations generate_round_observations(const RobotProfile& profile, RngStream& rng);
Observations generate_round_observations(const RobotProfile& profile, const ConfusionMatrix& confusion,
                                         RngStream& rng);

/// Largest-remainder rounding to round(min(1^T a, budget)) data-points, ties to
/// the lowest index. The total is capped at floor(budget) for fractional budgets.
std::vector<long> integerize_action(const Action& a);

/// Per-true-class counts landing in the cloud. Sampled draws one true class per
/// uploaded unit from column j of P; Expected returns P * a_int.
Vector realize_upload(std::span<const long> a_int, const FeasibleDataMatrix& P, RngStream& rng,
                      Realization mode);

/// Fraction of labels equal to each class.
ClassDistribution empirical_distribution(std::span<const int> labels, std::size_t n_class);

/// Runs observe, estimate, build, act, integerize, realize, update for each round.
/// Returns rounds + 1 metric rows (row 0 is the initial cloud).
ScenarioResult run_scenario(const Scenario& scenario);

/// The fleet's optimization inputs for one round: observations, estimated p(y),
/// and the posterior matrices.
std::vector<FleetMember> build_round_fleet(const Scenario& scenario, int round);

}  // namespace fleetsample
