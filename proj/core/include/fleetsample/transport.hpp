#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fleetsample/model.hpp"

namespace fleetsample {

enum class CommMode { Broadcast, Ring };

std::string_view to_string(CommMode mode);
CommMode parse_comm_mode(std::string_view name);

enum class PhaseTag { InitShare, SweepShare, RingSum };

/// One payload from one sender to one receiver; the unit messages are counted in.
struct ActionMessage {
  int sender = 0;
  int receiver = 0;
  Vector payload;
  PhaseTag phase_tag = PhaseTag::InitShare;
};

/// Payloads received by each robot, indexed by receiver id.
using DeliveryMap = std::vector<std::vector<ActionMessage>>;

struct RingSweepResult {
  /// others_view[i] is the sum of every other robot's payload as robot i saw it
  /// when its turn came (robots ahead of it already updated).
  std::vector<Vector> others_view;
  /// Aggregate after the sweep, as delivered back around the ring.
  Vector total;
};

/// Simulated, synchronous, lossless inter-robot channel with exact message counts.
///
/// Broadcast mode: every share phase costs n(n-1) messages.
/// Ring mode: the head (first robot in the fleet order) collects the initial
/// payloads with n-1 messages; each sweep forwards a running sum down the ring
/// and hands the final total back up, 2(n-1) messages.
class MessageTransport {
 public:
  MessageTransport(CommMode mode, int n_robot);

  CommMode mode() const noexcept { return mode_; }
  int n_robot() const noexcept { return n_robot_; }
  std::int64_t sent_total() const noexcept { return sent_total_; }
  const std::vector<std::int64_t>& sent_per_phase() const noexcept { return sent_per_phase_; }

  /// Opens a new counting phase.
  void begin_phase();

  /// Every robot sends its payload to every other robot, in a fresh phase.
  DeliveryMap broadcast_actions(std::span<const Vector> payloads,
                                PhaseTag tag = PhaseTag::InitShare);

  /// One robot shares a payload with all peers inside the current phase.
  std::vector<ActionMessage> share_with_all(int sender, const Vector& payload,
                                            PhaseTag tag = PhaseTag::SweepShare);

  /// Ring mode: every robot but the head sends its payload to the head, which
  /// sums them in fleet order. Returns the head's total.
  Vector ring_collect(std::span<const int> fleet_order, std::span<const Vector> payloads);

  /// Called at each robot's turn with the sum of the other robots' current
  /// payloads; returns the robot's new payload.
  using PayloadProvider = std::function<Vector(int robot, const Vector& others_sum)>;

  /// Ring mode: one sweep of the running-sum protocol. `payloads` holds each
  /// robot's current (stale) payload by id; the head starts from the total it
  /// holds from ring_collect or the previous sweep. Each robot subtracts its own
  /// stale payload from the running sum it receives.
  RingSweepResult ring_pass_sum(std::span<const int> fleet_order, std::span<const Vector> payloads,
                                const PayloadProvider& provider);

 private:
  void count(std::int64_t messages);
  void check_order(std::span<const int> fleet_order) const;

  CommMode mode_;
  int n_robot_;
  std::int64_t sent_total_ = 0;
  std::vector<std::int64_t> sent_per_phase_;
  std::optional<Vector> head_total_;
};

}  // namespace fleetsample
