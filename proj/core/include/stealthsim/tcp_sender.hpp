#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "stealthsim/segment.hpp"
#include "stealthsim/sim_time.hpp"
#include "stealthsim/window.hpp"

namespace stealthsim {

enum class Phase : std::uint8_t { slow_start, congestion_avoidance, fast_recovery };

constexpr std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::slow_start: return "slow_start";
    case Phase::congestion_avoidance: return "congestion_avoidance";
    case Phase::fast_recovery: return "fast_recovery";
  }
  return "?";
}

struct TcpConfig {
  FlowId flow_id = 0;
  std::uint64_t initial_cwnd = 1;
  std::uint64_t initial_ssthresh = 64;
  SimTime rto_interval = SimTime::from_ms(400);
  /// Clamp applied to cwnd after every update; 0 disables it.
  std::uint64_t max_cwnd = 0;
  /// Total segments to send; 0 means an unbounded transfer.
  std::uint64_t transfer_segments = 0;
  unsigned dupack_threshold = 3;
  unsigned max_backoff = 64;
};

/// cwnd, ssthresh, dupACKcnt, phase and in-flight accounting of a Reno-style
/// sender. pending = next_seq - highest_acked.
struct TcpSenderState {
  Window cwnd;
  Window ssthresh;
  unsigned dup_ack_count = 0;
  Phase phase = Phase::slow_start;
  SeqNo next_seq = 0;
  SeqNo highest_acked = 0;
  SimTime rto_interval{};
  unsigned rto_backoff = 1;
  bool rto_armed = false;

  [[nodiscard]] std::uint64_t pending() const { return next_seq - highest_acked; }
  [[nodiscard]] SimTime current_rto() const { return rto_interval * rto_backoff; }
};

enum class TimerAction : std::uint8_t { keep, restart, stop };

/// What the sender wants done after an input. Segments are in transmit
/// order; a retransmission, when present, comes first.
struct SenderActions {
  std::vector<Segment> transmit;
  bool fast_retransmit = false;
  bool timeout = false;
  bool duplicate_ack = false;
  bool new_data_acked = false;
  std::optional<Phase> phase_change;
  TimerAction timer = TimerAction::keep;
};

/// TCP sender congestion control following the Reno FSM: slow start,
/// congestion avoidance, fast retransmit/fast recovery and RTO with
/// exponential backoff. Pure state machine; the caller owns the timer.
class TcpSender {
public:
  explicit TcpSender(const TcpConfig& cfg);

  /// Throws ProtocolError for an ACK beyond next_seq.
  SenderActions on_ack(const Segment& ack, SimTime now);
  SenderActions on_rto(SimTime now);
  /// Emits new segments while pending < floor(cwnd).
  SenderActions try_send(SimTime now);

  [[nodiscard]] const TcpSenderState& state() const { return st_; }
  /// Test hook: overwrite the state to drive specific FSM paths.
  void set_state(const TcpSenderState& s) { st_ = s; }
  [[nodiscard]] const TcpConfig& config() const { return cfg_; }

private:
  void emit_new(SimTime now, SenderActions& out);
  void clamp();
  [[nodiscard]] Window halved_ssthresh() const;

  TcpConfig cfg_;
  TcpSenderState st_;
};

}  // namespace stealthsim
