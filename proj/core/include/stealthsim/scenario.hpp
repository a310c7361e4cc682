#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stealthsim/adversary.hpp"
#include "stealthsim/esp.hpp"
#include "stealthsim/rttp.hpp"
#include "stealthsim/segment.hpp"
#include "stealthsim/sim_time.hpp"

namespace stealthsim {

/// One client, one server, two gateways:
///
///   server --LAN-- GW2 ==== tunnel (one_way_delay each way) ==== GW1 --LAN-- client
///
/// LAN hops are instantaneous. The server sends data, the client ACKs.
struct ScenarioConfig {
  std::string name;

  SimTime one_way_delay = SimTime::from_ms(50);
  std::uint64_t rate = 10'000'000;  // bytes per second
  bool link_serialization = false;
  std::uint64_t mss = 1000;
  std::uint64_t ack_size = 40;

  SimTime t_end = SimTime::from_s(60);
  std::uint64_t transfer_segments = 0;

  std::uint64_t anti_replay_window = 64;
  SaPolicy sa_policy = SaPolicy::single;

  std::uint64_t tcp_initial_cwnd = 1;
  std::uint64_t tcp_initial_ssthresh = 64;
  /// Unset means 4 * nominal rtt.
  std::optional<SimTime> tcp_rto;
  std::uint64_t tcp_max_cwnd = 0;
  unsigned tcp_dupack_threshold = 3;

  AdversaryConfig adversary;
  /// Where on the tunnel the adversary sees packets, measured from the
  /// sending gateway. Unset means half the one-way delay.
  std::optional<SimTime> tap_offset;

  RttpConfig rttp;

  /// Data segments whose first transmission is lost on the tunnel.
  std::vector<SeqNo> drop_data_seq;

  std::uint64_t seed = 1;

  [[nodiscard]] SimTime data_tx_time() const;
  [[nodiscard]] SimTime ack_tx_time() const;
  /// 2*one_way_delay plus one data and one ACK transmission time.
  [[nodiscard]] SimTime nominal_rtt() const;
  [[nodiscard]] SimTime effective_rto() const;
  [[nodiscard]] SimTime effective_tap_offset() const;
};

/// Parses the flat `key = value` scenario format. `#` starts a comment.
/// Durations take us, ms, s or rtt suffixes; rates take Bps, KBps, MBps;
/// sizes take an optional B suffix. Throws ParseError listing every
/// problem with its line and key.
ScenarioConfig parse_scenario(std::string_view text);

ScenarioConfig load_scenario_file(const std::string& path);

/// "50ms", "1.5s", "2rtt". The rtt unit needs `rtt`. Returns nullopt and
/// fills `error` on failure.
std::optional<SimTime> parse_duration(std::string_view text, std::optional<SimTime> rtt, std::string* error);

/// "10MBps", "500KBps", "1000". Bytes per second.
std::optional<std::uint64_t> parse_rate(std::string_view text, std::string* error);

/// Throws ParseError for cross-field violations. parse_scenario already
/// calls this; exposed for configs built in code.
void validate_scenario(const ScenarioConfig& cfg);

}  // namespace stealthsim
