#include "fleetsample/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fleetsample {

std::string_view to_string(Realization r) { return r == Realization::Expected ? "expected" : "sampled"; }

std::string_view to_string(EstimationMode m) {
  return m == EstimationMode::GroundTruth ? "ground-truth" : "linear-inversion";
}

Realization parse_realization(std::string_view name) {
  if (name == "expected") return Realization::Expected;
  if (name == "sampled") return Realization::Sampled;
  throw Error(ErrorCode::ConfigError,
              "realization: unknown value '" + std::string(name) + "' (expected or sampled)");
}

EstimationMode parse_estimation_mode(std::string_view name) {
  if (name == "ground-truth") return EstimationMode::GroundTruth;
  if (name == "linear-inversion") return EstimationMode::LinearInversion;
  throw Error(ErrorCode::ConfigError, "estimation_mode: unknown value '" + std::string(name) +
                                          "' (ground-truth or linear-inversion)");
}

void Scenario::validate() const {
  if (n_class == 0) throw Error(ErrorCode::BadDimension, "n_class must be positive");
  if (n_robot < 1) throw Error(ErrorCode::BadDimension, "n_robot must be positive");
  if (rounds < 1) throw Error(ErrorCode::BadDimension, "rounds must be at least 1");
  const auto n = static_cast<Eigen::Index>(n_class);
  if (target.size() != n) throw Error(ErrorCode::BadDimension, "target has wrong length");
  if (initial_cloud.size() != n) throw Error(ErrorCode::BadDimension, "initial_cloud has wrong length");
  CloudState(initial_cloud, target);
  if (static_cast<int>(robots.size()) != n_robot)
    throw Error(ErrorCode::BadDimension, "robots: expected " + std::to_string(n_robot) + " entries");
  for (std::size_t i = 0; i < robots.size(); ++i) {
    if (robots[i].id != static_cast<int>(i))
      throw Error(ErrorCode::BadDimension, "robots[" + std::to_string(i) + "]: id must equal its index");
    if (robots[i].true_dist.size() != n_class)
      throw Error(ErrorCode::BadDimension, "robots[" + std::to_string(i) + "].true_dist has wrong length");
    if (robots[i].confusion.size() != n_class)
      throw Error(ErrorCode::BadDimension, "robots[" + std::to_string(i) + "].confusion has wrong size");
    robots[i].validate();
  }
  for (std::size_t r = 0; r < confusion_schedule.size(); ++r) {
    if (static_cast<int>(confusion_schedule[r].size()) != n_robot)
      throw Error(ErrorCode::BadDimension, "confusion_schedule[" + std::to_string(r) + "] needs one matrix per robot");
    for (const auto& c : confusion_schedule[r]) {
      if (c.size() != n_class)
        throw Error(ErrorCode::BadDimension, "confusion_schedule[" + std::to_string(r) + "] has wrong size");
    }
  }
  if (!integer_uploads && realization != Realization::Expected)
    throw Error(ErrorCode::ConfigError, "integer_uploads=false requires realization=expected");
  solver.validate();
  if (!(sweep_threshold > 0.0) || max_sweeps < 1)
    throw Error(ErrorCode::ConfigError, "solver: sweep_threshold and max_sweeps must be positive");
}

const ConfusionMatrix& Scenario::confusion_for(int robot, int round) const {
  const auto r = static_cast<std::size_t>(robot);
  if (confusion_schedule.empty()) return robots[r].confusion;
  const std::size_t idx = std::min(static_cast<std::size_t>(std::max(round, 1) - 1), confusion_schedule.size() - 1);
  return confusion_schedule[idx][r];
}

double Scenario::total_budget() const {
  double total = 0.0;
  for (const auto& r : robots) total += r.cache_budget;
  return total;
}

Observations generate_round_observations(const RobotProfile& profile, RngStream& rng) {
  return generate_round_observations(profile, profile.confusion, rng);
}

Observations generate_round_observations(const RobotProfile& profile, const ConfusionMatrix& confusion,
                                         RngStream& rng) {
  Observations obs;
  const auto count = static_cast<std::size_t>(std::max(profile.obs_per_round, 0L));
  obs.true_labels.reserve(count);
  obs.predicted_labels.reserve(count);
  const Matrix& C = confusion.matrix();
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t y = rng.categorical(profile.true_dist.probs());
    const std::size_t y_hat = rng.categorical(C.row(static_cast<Eigen::Index>(y)).transpose());
    obs.true_labels.push_back(static_cast<int>(y));
    obs.predicted_labels.push_back(static_cast<int>(y_hat));
  }
  return obs;
}

std::vector<long> integerize_action(const Action& a) {
  const Vector& x = a.counts();
  const double budget = a.cache_budget();
  long total = std::lround(std::min(x.sum(), budget));
  total = std::min(total, static_cast<long>(std::floor(budget + kDistributionTolerance)));

  std::vector<long> out(static_cast<std::size_t>(x.size()));
  std::vector<double> remainder(out.size());
  long assigned = 0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double v = x(static_cast<Eigen::Index>(k));
    out[k] = static_cast<long>(std::floor(v));
    remainder[k] = v - std::floor(v);
    assigned += out[k];
  }
  std::vector<std::size_t> idx(out.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t l, std::size_t r) { return remainder[l] > remainder[r]; });
  for (std::size_t k = 0; assigned < total && k < idx.size(); ++k, ++assigned) ++out[idx[k]];
  // Floors can exceed a capped total only through rounding noise in x.
  for (std::size_t k = out.size(); assigned > total && k-- > 0;) {
    const std::size_t j = idx[k];
    if (out[j] > 0) {
      --out[j];
      --assigned;
    }
  }
  return out;
}

Vector realize_upload(std::span<const long> a_int, const FeasibleDataMatrix& P, RngStream& rng,
                      Realization mode) {
  const Matrix& M = P.matrix();
  if (static_cast<Eigen::Index>(a_int.size()) != M.cols())
    throw Error(ErrorCode::DimensionMismatch, "integer action length differs from feasible matrix");
  Vector a(M.cols());
  for (std::size_t j = 0; j < a_int.size(); ++j) {
    if (a_int[j] < 0) throw Error(ErrorCode::NegativeContribution, "integer action has a negative entry");
    a(static_cast<Eigen::Index>(j)) = static_cast<double>(a_int[j]);
  }
  if (mode == Realization::Expected) return M * a;

  Vector out = Vector::Zero(M.rows());
  for (std::size_t j = 0; j < a_int.size(); ++j) {
    const auto col = M.col(static_cast<Eigen::Index>(j));
    for (long unit = 0; unit < a_int[j]; ++unit) out(static_cast<Eigen::Index>(rng.categorical(col))) += 1.0;
  }
  return out;
}

ClassDistribution empirical_distribution(std::span<const int> labels, std::size_t n_class) {
  if (labels.empty()) return ClassDistribution::uniform(n_class);
  Vector freq = Vector::Zero(static_cast<Eigen::Index>(n_class));
  for (int y : labels) freq(y) += 1.0;
  freq /= static_cast<double>(labels.size());
  return ClassDistribution(freq / freq.sum());
}

std::vector<FleetMember> build_round_fleet(const Scenario& scenario, int round) {
  std::vector<FleetMember> fleet;
  fleet.reserve(scenario.robots.size());
  for (const auto& robot : scenario.robots) {
    const ConfusionMatrix& C = scenario.confusion_for(robot.id, round);
    RngStream obs_rng = make_substream(scenario.seed, robot.id, round, StreamPurpose::Observe);
    const Observations obs = generate_round_observations(robot, C, obs_rng);
    const ClassDistribution predicted = empirical_distribution(obs.predicted_labels, scenario.n_class);
    const ClassDistribution estimate =
        estimate_true_distribution(predicted, C, scenario.estimation, robot.true_dist);
    fleet.push_back(FleetMember{build_feasible_matrix(C, estimate), robot.cache_budget});
  }
  return fleet;
}

namespace {

std::vector<Action> choose_actions(const Scenario& s, std::span<const FleetMember> fleet, const CloudState& cloud,
                                   MessageTransport& transport, int& sweeps) {
  sweeps = 0;
  std::vector<Action> actions;
  switch (s.policy) {
    case PolicyKind::Uniform:
      for (const auto& r : fleet) actions.push_back(uniform_action(s.n_class, r.cache_budget));
      return actions;
    case PolicyKind::Greedy:
      for (const auto& r : fleet) actions.push_back(greedy_action(r, cloud, s.solver));
      return actions;
    case PolicyKind::Oracle:
    case PolicyKind::LowerBound:
      return oracle_actions(fleet, cloud, s.solver);
    case PolicyKind::Interactive: {
      InteractiveConfig icfg;
      icfg.sweep_threshold = s.sweep_threshold;
      icfg.max_sweeps = s.max_sweeps;
      InteractiveResult res = interactive_actions(fleet, cloud, transport, s.solver, icfg);
      sweeps = res.trace.sweeps;
      return std::move(res.actions);
    }
  }
  return actions;
}

}  // namespace

ScenarioResult run_scenario(const Scenario& scenario) {
  scenario.validate();
  CloudState cloud(scenario.initial_cloud, scenario.target);
  MessageTransport transport(scenario.comm_mode, scenario.n_robot);

  ScenarioResult result{{}, cloud};
  result.metrics.reserve(static_cast<std::size_t>(scenario.rounds) + 1);
  const double l2_initial = loss_l2(cloud);
  result.metrics.push_back(RoundMetrics{0, l2_initial, l2_initial, 0, cloud.counts(), 0});

  for (int round = 1; round <= scenario.rounds; ++round) {
    const std::vector<FleetMember> fleet = build_round_fleet(scenario, round);
    const double bound = lower_bound(cloud, 1, scenario.total_budget());

    int sweeps = 0;
    std::vector<Action> actions;
    try {
      actions = choose_actions(scenario, fleet, cloud, transport, sweeps);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NotConverged)
        throw Error(ErrorCode::NotConverged, "round " + std::to_string(round) + ": " + e.detail());
      throw;
    }

    std::vector<Vector> uploads;
    uploads.reserve(actions.size());
    for (std::size_t i = 0; i < actions.size(); ++i) {
      RngStream up_rng = make_substream(scenario.seed, static_cast<int>(i), round, StreamPurpose::Upload);
      if (scenario.integer_uploads) {
        const std::vector<long> a_int = integerize_action(actions[i]);
        uploads.push_back(realize_upload(a_int, fleet[i].feasible, up_rng, scenario.realization));
      } else {
        uploads.push_back(fleet[i].feasible.matrix() * actions[i].counts());
      }
    }
    cloud = update_cloud_counts(cloud, uploads);

    RoundMetrics row;
    row.round = round;
    row.lower_bound = bound;
    row.l2_distance = scenario.policy == PolicyKind::LowerBound ? bound : loss_l2(cloud);
    row.cumulative_messages = transport.sent_total();
    row.per_class_cloud_counts = cloud.counts();
    row.sweeps = sweeps;
    result.metrics.push_back(std::move(row));
  }
  result.final_cloud = cloud;
  return result;
}

}  // namespace fleetsample
