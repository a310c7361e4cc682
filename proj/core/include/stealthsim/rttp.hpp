#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "stealthsim/esp.hpp"
#include "stealthsim/segment.hpp"
#include "stealthsim/sim_time.hpp"

namespace stealthsim {

/// hold_acks quarantines the duplicate ACKs triggered by a suspicious
/// arrival. buffer_data instead holds the suspicious data packet itself
/// until the gap in front of it closes.
enum class RttpMode : std::uint8_t { hold_acks, buffer_data };

std::string_view to_string(RttpMode m);
std::optional<RttpMode> parse_rttp_mode(std::string_view s);

struct RttpConfig {
  bool enabled = false;
  RttpMode mode = RttpMode::hold_acks;
  /// An arrival is suspicious when its delay is below guard * typicalDelay.
  double guard = 0.85;
  std::uint64_t alpha_num = 1;
  std::uint64_t alpha_den = 8;
  std::size_t capacity = 64;
};

/// EWMA of one-way tunnel delay, seeded by the first sample.
class DelayEstimator {
public:
  DelayEstimator(std::uint64_t alpha_num = 1, std::uint64_t alpha_den = 8);

  /// srtt <- (1 - alpha) * srtt + alpha * sample, rounded to the nearest
  /// microsecond. Throws ConfigError for a zero sample.
  SimTime update(SimTime sample);

  [[nodiscard]] bool initialized() const { return initialized_; }
  [[nodiscard]] SimTime srtt() const { return srtt_; }
  void seed(SimTime srtt);

private:
  std::uint64_t num_;
  std::uint64_t den_;
  bool initialized_ = false;
  SimTime srtt_{};
};

/// Highest contiguous inner sequence forwarded toward the protected host.
class InnerSeqTracker {
public:
  explicit InnerSeqTracker(SeqNo initial = 0) : next_(initial) {}
  void forwarded(SeqNo seq);
  [[nodiscard]] SeqNo expected() const { return next_; }

private:
  SeqNo next_;
  std::set<SeqNo> above_;
};

struct RttpStats {
  std::uint64_t alerts = 0;
  std::uint64_t collisions = 0;
  std::uint64_t held = 0;
  std::uint64_t released = 0;
  std::uint64_t discarded = 0;
  std::uint64_t overflows = 0;
  std::uint64_t buffered_data = 0;
  std::uint64_t estimator_samples = 0;
};

struct RttpState {
  DelayEstimator typical;
  bool alert = false;
  SeqNo pkt_sn = 0;
  SimTime rcpt_time{};
  std::optional<SeqNo> ack_sn;
  std::uint64_t dup_ack_count = 0;
  std::deque<Segment> held_acks;
  std::deque<Segment> held_data;
  std::optional<SimTime> timer;
};

/// What the gateway does with an incoming tunnel packet.
struct IncomingResult {
  /// Inner segments to hand to the protected host, in order.
  std::vector<Segment> forward;
  bool suspicious = false;
  bool discarded_held = false;
  /// Timer to arm (buffer_data mode) or to cancel.
  std::optional<SimTime> arm_timer;
  bool cancel_timer = false;
};

struct OutgoingResult {
  /// ACKs to send into the tunnel now, in order.
  std::vector<Segment> forward;
  bool held = false;
  bool overflow = false;
  std::optional<SimTime> arm_timer;
  bool cancel_timer = false;
};

/// Receiving-gateway side of the reordering tolerant tunneling protocol.
///
/// Incoming data whose authenticated timestamp shows it travelled faster
/// than usual and that is ahead of the expected sequence raises an alert.
/// While the alert stands, duplicate ACKs for the missing segment are held
/// until either the missing segment shows up (held ACKs are dropped) or
/// rcptTime + typicalDelay passes (held ACKs are released in order).
/// The caller owns the timer event and the inner-sequence tracker.
class RttpGateway {
public:
  explicit RttpGateway(const RttpConfig& cfg);

  IncomingResult on_incoming(const EspPacket& pkt, SimTime now, SeqNo expected_inner);
  OutgoingResult on_outgoing_ack(const Segment& ack, SimTime now);
  /// Releases everything held. No-op when nothing is held.
  std::vector<Segment> on_timer(SimTime now);

  [[nodiscard]] const RttpState& state() const { return st_; }
  [[nodiscard]] const RttpStats& stats() const { return stats_; }
  [[nodiscard]] const RttpConfig& config() const { return cfg_; }
  [[nodiscard]] bool suspicious_delay(SimTime delay) const;

private:
  void clear_alert();
  std::vector<Segment> drain_data(SeqNo expected_inner);

  RttpConfig cfg_;
  RttpState st_;
  RttpStats stats_;
};

}  // namespace stealthsim
