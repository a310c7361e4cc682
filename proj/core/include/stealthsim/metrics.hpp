#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stealthsim/adversary.hpp"
#include "stealthsim/anti_replay.hpp"
#include "stealthsim/budget.hpp"
#include "stealthsim/segment.hpp"
#include "stealthsim/sim_time.hpp"
#include "stealthsim/tcp_sender.hpp"

namespace stealthsim {

/// One row of the cwnd trace, taken whenever the sender reacts to an ACK or
/// a timeout.
struct TraceSample {
  SimTime time;
  std::uint64_t cwnd_raw = 0;  // Window::raw()
  /// cwnd outside fast recovery, ssthresh inside it (inflation excluded).
  std::uint64_t effective_raw = 0;
  Phase phase = Phase::slow_start;
  std::string event;
};

enum class InjectionFate : std::uint8_t { in_transit, accepted, duplicate, left_of_window };

constexpr std::string_view to_string(InjectionFate f) {
  switch (f) {
    case InjectionFate::in_transit: return "in_transit";
    case InjectionFate::accepted: return "accepted";
    case InjectionFate::duplicate: return "duplicate";
    case InjectionFate::left_of_window: return "left_of_window";
  }
  return "?";
}

struct InjectionRecord {
  SimTime injected_at;
  SimTime deliver_at;
  EspSeq esp_seq = 0;
  std::uint32_t sa_id = 0;
  SegmentKind kind = SegmentKind::data;
  SeqNo inner = 0;  // seq for data, ack_num for ACKs
  LinkDirection toward = LinkDirection::to_client;
  /// Provenance: the copy is the very packet object the adversary observed.
  bool matches_observed = false;
  InjectionFate fate = InjectionFate::in_transit;
};

/// cwnd sampled just before an attack epoch's first copy is delivered.
struct EpochSample {
  std::uint64_t index = 0;
  SimTime at;
  double cwnd = 0.0;
  std::uint64_t acked_segments = 0;
};

struct ReplayDrops {
  std::uint64_t left_of_window = 0;
  std::uint64_t duplicate = 0;
  [[nodiscard]] std::uint64_t total() const { return left_of_window + duplicate; }
};

struct RunMetrics {
  std::string scenario;
  std::uint64_t seed = 0;
  SimTime t_end;
  SimTime rtt;
  std::uint64_t mss = 0;

  std::vector<TraceSample> trace;

  std::uint64_t data_transmissions = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t segments_acked = 0;
  std::uint64_t bytes_acked = 0;
  std::uint64_t in_flight_at_end = 0;
  double throughput_Bps = 0.0;

  std::uint64_t fast_retransmits = 0;
  std::uint64_t rtos = 0;
  std::uint64_t dup_acks_at_sender = 0;
  std::optional<SimTime> first_fast_retransmit_at;
  std::optional<SimTime> first_rto_at;

  double max_cwnd = 0.0;
  /// Time-weighted mean of the effective window over the whole run.
  double avg_cwnd = 0.0;
  /// Throughput over the second half of the run.
  double late_throughput_Bps = 0.0;

  /// Drops of packets the gateways sent, split from drops of adversary copies.
  ReplayDrops legit_drops;
  ReplayDrops injected_drops;
  std::uint64_t scripted_drops = 0;

  std::uint64_t injections = 0;
  std::uint64_t injections_accepted = 0;
  std::uint64_t adversary_epochs = 0;
  std::uint64_t adversary_epochs_skipped = 0;
  std::vector<InjectionRecord> injection_log;

  PacketRate budget_rho;
  std::uint64_t budget_sigma = 0;
  bool budget_sound = true;
  double budget_worst_excess = 0.0;

  std::uint64_t rttp_alerts = 0;
  std::uint64_t rttp_collisions = 0;
  std::uint64_t rttp_held = 0;
  std::uint64_t rttp_released = 0;
  std::uint64_t rttp_discarded = 0;
  std::uint64_t rttp_overflows = 0;
  std::uint64_t rttp_buffered_data = 0;
  SimTime rttp_typical_delay;

  std::vector<EpochSample> epoch_samples;
  std::optional<std::uint64_t> steady_epoch;
  double steady_max_cwnd = 0.0;
  double steady_avg_cwnd = 0.0;
  double steady_throughput_Bps = 0.0;

  bool conservation_ok = true;
  std::uint64_t events_dispatched = 0;
};

}  // namespace stealthsim
