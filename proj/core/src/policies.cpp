#include "fleetsample/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fleetsample {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Uniform: return "uniform";
    case PolicyKind::Greedy: return "greedy";
    case PolicyKind::Oracle: return "oracle";
    case PolicyKind::Interactive: return "interactive";
    case PolicyKind::LowerBound: return "lower-bound";
  }
  return "unknown";
}

PolicyKind parse_policy(std::string_view name) {
  for (PolicyKind k : kAllPolicies) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::UnknownPolicy,
              "policy '" + std::string(name) + "'; valid: uniform, greedy, oracle, interactive, lower-bound");
}

Action uniform_action(std::size_t n_class, double budget) {
  if (n_class == 0) throw Error(ErrorCode::ZeroClasses, "uniform action over zero classes");
  return Action(Vector::Constant(static_cast<Eigen::Index>(n_class), budget / static_cast<double>(n_class)),
                budget);
}

Action greedy_action(const FleetMember& robot, const CloudState& cloud, const SolverConfig& cfg) {
  if (robot.feasible.size() != cloud.size())
    throw Error(ErrorCode::DimensionMismatch, "robot matrix and cloud differ in size");
  return solve_single(robot.feasible, cloud, robot.cache_budget, cfg).actions.front();
}

namespace {

std::vector<FeasibleDataMatrix> matrices_of(std::span<const FleetMember> fleet) {
  std::vector<FeasibleDataMatrix> out;
  out.reserve(fleet.size());
  for (const auto& r : fleet) out.push_back(r.feasible);
  return out;
}

std::vector<double> budgets_of(std::span<const FleetMember> fleet) {
  std::vector<double> out;
  out.reserve(fleet.size());
  for (const auto& r : fleet) out.push_back(r.cache_budget);
  return out;
}

std::vector<int> resolve_order(const std::vector<int>& requested, std::size_t n) {
  if (requested.empty()) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    return order;
  }
  std::vector<int> sorted = requested;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (sorted.size() != n || sorted[k] != static_cast<int>(k))
      throw Error(ErrorCode::InvalidArgument, "interactive order must be a permutation of robot ids");
  }
  return requested;
}

}  // namespace

std::vector<Action> oracle_actions(std::span<const FleetMember> fleet, const CloudState& cloud,
                                   const SolverConfig& cfg) {
  if (fleet.empty()) throw Error(ErrorCode::EmptyFleet, "oracle needs at least one robot");
  const auto mats = matrices_of(fleet);
  const auto budgets = budgets_of(fleet);
  std::vector<Vector> start;
  for (const auto& r : fleet) start.push_back(greedy_action(r, cloud, cfg).counts());
  return solve_stacked(mats, cloud, budgets, cfg, start).actions;
}

InteractiveResult interactive_actions(std::span<const FleetMember> fleet, const CloudState& cloud,
                                      MessageTransport& transport, const SolverConfig& cfg,
                                      const InteractiveConfig& icfg) {
  if (fleet.empty()) throw Error(ErrorCode::EmptyFleet, "interactive needs at least one robot");
  if (transport.n_robot() != static_cast<int>(fleet.size()))
    throw Error(ErrorCode::DimensionMismatch, "transport sized for a different fleet");
  const std::size_t n_robot = fleet.size();
  const std::vector<int> order = resolve_order(icfg.order, n_robot);
  const std::int64_t messages_before = transport.sent_total();
  const Vector deficit = cloud.deficit();

  InteractiveResult out;
  InteractiveTrace& trace = out.trace;

  std::vector<Vector> a(n_robot);
  std::vector<Vector> v(n_robot);
  for (std::size_t i = 0; i < n_robot; ++i) {
    a[i] = greedy_action(fleet[i], cloud, cfg).counts();
    v[i] = fleet[i].feasible.matrix() * a[i];
  }

  Vector total;
  if (transport.mode() == CommMode::Broadcast) {
    const DeliveryMap delivered = transport.broadcast_actions(v, PhaseTag::InitShare);
    // Every robot folds the shares in fleet order, its own included.
    const auto& inbox = delivered[static_cast<std::size_t>(order[0])];
    auto payload_of = [&](int id) -> const Vector& {
      if (id == order[0]) return v[static_cast<std::size_t>(id)];
      for (const auto& m : inbox) {
        if (m.sender == id) return m.payload;
      }
      throw Error(ErrorCode::ProtocolError, "missing initial share from robot " + std::to_string(id));
    };
    total = payload_of(order[0]);
    for (std::size_t k = 1; k < n_robot; ++k) total += payload_of(order[k]);
  } else {
    total = transport.ring_collect(order, v);
  }
  if (icfg.record_steps) trace.step_objectives.push_back((deficit - total).norm());

  // Best response of one robot given the sum of everyone else's shared v.
  auto best_response = [&](std::size_t id, const Vector& others) -> Vector {
    const Vector goal = deficit - others;
    const double budget[] = {fleet[id].cache_budget};
    const Vector warm[] = {a[id]};
    SolveResult r = solve_capped_lsq(std::span<const FeasibleDataMatrix>(&fleet[id].feasible, 1), goal,
                                     budget, cfg, warm);
    a[id] = r.actions.front().counts();
    return fleet[id].feasible.matrix() * a[id];
  };

  for (int pass = 1; pass <= icfg.max_sweeps; ++pass) {
    double max_change = 0.0;
    if (transport.mode() == CommMode::Broadcast) {
      transport.begin_phase();
      for (int id_int : order) {
        const auto id = static_cast<std::size_t>(id_int);
        const Vector others = total - v[id];
        Vector updated = best_response(id, others);
        max_change = std::max(max_change, (updated - v[id]).norm());
        const auto sent = transport.share_with_all(id_int, updated, PhaseTag::SweepShare);
        // Receivers swap the sender's old share for the new one.
        total = others + (sent.empty() ? updated : sent.front().payload);
        v[id] = std::move(updated);
        if (icfg.record_steps) trace.step_objectives.push_back((deficit - total).norm());
      }
    } else {
      const std::vector<Vector> stale = v;
      const RingSweepResult ring =
          transport.ring_pass_sum(order, stale, [&](int id_int, const Vector& others) {
            const auto id = static_cast<std::size_t>(id_int);
            Vector updated = best_response(id, others);
            max_change = std::max(max_change, (updated - stale[id]).norm());
            v[id] = updated;
            if (icfg.record_steps) trace.step_objectives.push_back((deficit - (others + updated)).norm());
            return updated;
          });
      total = ring.total;
    }
    trace.passes = pass;
    trace.per_sweep_max_change.push_back(max_change);
    if (max_change <= icfg.sweep_threshold) {
      trace.converged = true;
      break;
    }
  }
  trace.sweeps = std::max(1, trace.passes - 1);
  trace.messages = transport.sent_total() - messages_before;
  if (!trace.converged) {
    throw Error(ErrorCode::NotConverged,
                "interactive did not converge within " + std::to_string(icfg.max_sweeps) +
                    " sweeps (last change " + std::to_string(trace.per_sweep_max_change.back()) + ")");
  }

  out.actions.reserve(n_robot);
  for (std::size_t i = 0; i < n_robot; ++i) out.actions.emplace_back(a[i], fleet[i].cache_budget);
  out.feasible = std::move(v);
  out.total = std::move(total);
  return out;
}

double lower_bound(const CloudState& cloud, int n_robot, double budget) {
  if (n_robot < 1) throw Error(ErrorCode::EmptyFleet, "lower bound needs at least one robot");
  if (budget < 0.0) throw Error(ErrorCode::NegativeBudget, "budget must be nonnegative");
  const Vector d = cloud.deficit();
  const double excess = d.sum() - static_cast<double>(n_robot) * budget;
  return std::max(excess, 0.0) / std::sqrt(static_cast<double>(d.size()));
}

double greedy_oracle_gap_bound(std::span<const FeasibleAction> greedy_vs,
                               std::span<const FeasibleAction> oracle_vs) {
  if (greedy_vs.size() != oracle_vs.size())
    throw Error(ErrorCode::DimensionMismatch, "greedy and oracle lists differ in length");
  if (greedy_vs.empty()) return 0.0;
  Vector diff = Vector::Zero(greedy_vs.front().expected_true_counts.size());
  for (std::size_t i = 0; i < greedy_vs.size(); ++i) {
    if (greedy_vs[i].expected_true_counts.size() != diff.size() ||
        oracle_vs[i].expected_true_counts.size() != diff.size())
      throw Error(ErrorCode::DimensionMismatch, "feasible actions differ in length");
    diff += oracle_vs[i].expected_true_counts - greedy_vs[i].expected_true_counts;
  }
  return diff.norm();
}

std::vector<FeasibleAction> feasible_images(std::span<const FleetMember> fleet,
                                            std::span<const Action> actions) {
  if (fleet.size() != actions.size())
    throw Error(ErrorCode::DimensionMismatch, "one action per robot required");
  std::vector<FeasibleAction> out;
  out.reserve(fleet.size());
  for (std::size_t i = 0; i < fleet.size(); ++i) out.push_back(to_feasible(fleet[i].feasible, actions[i]));
  return out;
}

double joint_loss(const CloudState& cloud, std::span<const FeasibleAction> vs) {
  Vector r = cloud.deficit();
  for (const auto& v : vs) {
    if (v.expected_true_counts.size() != r.size())
      throw Error(ErrorCode::DimensionMismatch, "feasible action length differs from cloud");
    r -= v.expected_true_counts;
  }
  return r.norm();
}

}  // namespace fleetsample
