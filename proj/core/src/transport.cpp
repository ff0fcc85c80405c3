#include "fleetsample/transport.hpp"

#include <string>

namespace fleetsample {

std::string_view to_string(CommMode mode) {
  return mode == CommMode::Broadcast ? "broadcast" : "ring";
}

CommMode parse_comm_mode(std::string_view name) {
  if (name == "broadcast") return CommMode::Broadcast;
  if (name == "ring") return CommMode::Ring;
  throw Error(ErrorCode::ConfigError,
              "comm_mode: unknown mode '" + std::string(name) + "' (expected broadcast or ring)");
}

MessageTransport::MessageTransport(CommMode mode, int n_robot) : mode_(mode), n_robot_(n_robot) {
  if (n_robot < 1) throw Error(ErrorCode::EmptyFleet, "transport needs at least one robot");
}

void MessageTransport::begin_phase() { sent_per_phase_.push_back(0); }

void MessageTransport::count(std::int64_t messages) {
  if (sent_per_phase_.empty()) begin_phase();
  sent_per_phase_.back() += messages;
  sent_total_ += messages;
}

void MessageTransport::check_order(std::span<const int> fleet_order) const {
  if (static_cast<int>(fleet_order.size()) != n_robot_)
    throw Error(ErrorCode::BrokenRing, "fleet order has " + std::to_string(fleet_order.size()) +
                                           " entries for " + std::to_string(n_robot_) + " robots");
  std::vector<bool> seen(static_cast<std::size_t>(n_robot_), false);
  for (int id : fleet_order) {
    if (id < 0 || id >= n_robot_ || seen[static_cast<std::size_t>(id)])
      throw Error(ErrorCode::BrokenRing, "fleet order is not a permutation (id " + std::to_string(id) + ")");
    seen[static_cast<std::size_t>(id)] = true;
  }
}

DeliveryMap MessageTransport::broadcast_actions(std::span<const Vector> payloads, PhaseTag tag) {
  if (static_cast<int>(payloads.size()) != n_robot_)
    throw Error(ErrorCode::WrongPayloadCount, "expected " + std::to_string(n_robot_) + " payloads, got " +
                                                  std::to_string(payloads.size()));
  begin_phase();
  DeliveryMap delivered(static_cast<std::size_t>(n_robot_));
  for (int sender = 0; sender < n_robot_; ++sender) {
    for (int receiver = 0; receiver < n_robot_; ++receiver) {
      if (receiver == sender) continue;
      delivered[static_cast<std::size_t>(receiver)].push_back(
          ActionMessage{sender, receiver, payloads[static_cast<std::size_t>(sender)], tag});
    }
  }
  count(static_cast<std::int64_t>(n_robot_) * (n_robot_ - 1));
  return delivered;
}

std::vector<ActionMessage> MessageTransport::share_with_all(int sender, const Vector& payload,
                                                            PhaseTag tag) {
  if (sender < 0 || sender >= n_robot_)
    throw Error(ErrorCode::ProtocolError, "unknown sender " + std::to_string(sender));
  std::vector<ActionMessage> out;
  out.reserve(static_cast<std::size_t>(n_robot_ - 1));
  for (int receiver = 0; receiver < n_robot_; ++receiver) {
    if (receiver != sender) out.push_back(ActionMessage{sender, receiver, payload, tag});
  }
  count(n_robot_ - 1);
  return out;
}

Vector MessageTransport::ring_collect(std::span<const int> fleet_order, std::span<const Vector> payloads) {
  check_order(fleet_order);
  if (static_cast<int>(payloads.size()) != n_robot_)
    throw Error(ErrorCode::WrongPayloadCount, "expected " + std::to_string(n_robot_) + " payloads");
  begin_phase();
  Vector total = payloads[static_cast<std::size_t>(fleet_order[0])];
  for (std::size_t k = 1; k < fleet_order.size(); ++k) {
    total += payloads[static_cast<std::size_t>(fleet_order[k])];
  }
  count(n_robot_ - 1);
  head_total_ = total;
  return total;
}

RingSweepResult MessageTransport::ring_pass_sum(std::span<const int> fleet_order,
                                                std::span<const Vector> payloads,
                                                const PayloadProvider& provider) {
  check_order(fleet_order);
  if (static_cast<int>(payloads.size()) != n_robot_)
    throw Error(ErrorCode::WrongPayloadCount, "expected " + std::to_string(n_robot_) + " payloads");
  if (!head_total_) throw Error(ErrorCode::ProtocolError, "ring_pass_sum before ring_collect");
  begin_phase();

  RingSweepResult result;
  result.others_view.resize(static_cast<std::size_t>(n_robot_));
  // Forward pass: the running sum always covers every robot's latest payload.
  Vector running = *head_total_;
  for (std::size_t k = 0; k < fleet_order.size(); ++k) {
    const auto id = static_cast<std::size_t>(fleet_order[k]);
    Vector others = running - payloads[id];
    Vector updated = provider(fleet_order[k], others);
    result.others_view[id] = others;
    running = others + updated;
  }
  count(n_robot_ - 1);
  // Backward pass hands the final total back to the head.
  count(n_robot_ - 1);
  head_total_ = running;
  result.total = std::move(running);
  return result;
}

}  // namespace fleetsample
