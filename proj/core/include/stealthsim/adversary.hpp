#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string_view>
#include <vector>

#include "stealthsim/budget.hpp"
#include "stealthsim/esp.hpp"
#include "stealthsim/sim_time.hpp"

namespace stealthsim {

enum class Strategy : std::uint8_t { none, ack_duplicator, data_duplicator, speedup_single, speedup_multi };

/// Which honest links the adversary taps.
enum class TapDirection : std::uint8_t { client_to_server, server_to_client, both };

/// The link a packet travels on.
enum class LinkDirection : std::uint8_t { to_server, to_client };

/// transparent: inner TCP headers are readable. opaque: only ESP metadata
/// (size, direction, sequence number) is visible and ACKs are recognised as
/// small packets heading toward the server.
enum class Observability : std::uint8_t { transparent, opaque };

std::string_view to_string(Strategy s);
std::string_view to_string(TapDirection d);
std::string_view to_string(Observability o);
std::optional<Strategy> parse_strategy(std::string_view s);
std::optional<TapDirection> parse_tap_direction(std::string_view s);
std::optional<Observability> parse_observability(std::string_view s);

struct AdversaryConfig {
  Strategy strategy = Strategy::none;
  SimTime speedup{};
  TapDirection direction = TapDirection::server_to_client;
  SimTime epoch_period{};
  PacketRate rho{};
  std::uint64_t sigma = 3;
  /// Copies per epoch for the duplicators and speedup_multi.
  unsigned copies = 3;
  /// No epoch fires before this instant.
  SimTime start{};
  /// Stop after this many epochs; 0 means unlimited.
  std::uint64_t max_epochs = 0;
  Observability observability = Observability::transparent;
  /// Opaque mode: packets up to this size count as ACKs.
  std::size_t ack_size_threshold = 100;
  /// Anti-replay width the adversary assumes at the victim gateway.
  std::uint64_t known_window = 0;
};

/// A packet seen on a tapped link.
struct Observation {
  EspPacketRef packet;
  SimTime observed_at;
  /// When the honest copy reaches the far gateway.
  SimTime honest_arrival;
  LinkDirection link = LinkDirection::to_client;
};

/// A duplicate of an observed packet, delivered to the gateway at the far
/// end of `toward`.
struct Injection {
  EspPacketRef packet;
  SimTime injected_at;
  SimTime deliver_at;
  LinkDirection toward = LinkDirection::to_client;
};

struct AdversaryStats {
  std::uint64_t epochs = 0;
  std::uint64_t epochs_skipped = 0;  // budget denials
  std::uint64_t injected = 0;
  std::uint64_t observed = 0;
};

/// Stealth MITM that can only add deliveries: copies of packets it has seen,
/// either on the honest schedule or ahead of it over a faster path.
///
/// Packets handed over at the same instant form one burst. The harness calls
/// observe() for every packet on a tapped link and decide() once after the
/// last observation of an instant; strategies that pick "the last segments
/// of the window" need the whole burst.
class Adversary {
public:
  explicit Adversary(const AdversaryConfig& cfg);

  void observe(const Observation& obs);

  /// Returns this instant's injections, ordered by delivery time and then
  /// by ESP sequence number. Empty when no epoch is due, nothing qualifies,
  /// or the budget denies the epoch.
  std::vector<Injection> decide(SimTime now);

  [[nodiscard]] bool taps(LinkDirection link) const;
  [[nodiscard]] const AdversaryConfig& config() const { return cfg_; }
  [[nodiscard]] const AdversaryStats& stats() const { return stats_; }
  [[nodiscard]] const AdversaryBudget& budget() const { return budget_; }
  [[nodiscard]] SimTime next_due() const { return next_due_; }

private:
  [[nodiscard]] bool looks_like_ack(const Observation& o) const;
  [[nodiscard]] bool looks_like_data(const Observation& o) const;
  void prune(SimTime now);
  [[nodiscard]] std::vector<const Observation*> travelling_data(SimTime now) const;

  std::vector<Injection> duplicate_latest(SimTime now, bool want_ack) const;
  std::vector<Injection> speedup_single(SimTime now) const;
  std::vector<Injection> speedup_multi(SimTime now) const;

  AdversaryConfig cfg_;
  AdversaryBudget budget_;
  AdversaryStats stats_;
  SimTime next_due_{};
  std::deque<Observation> in_flight_;
  std::vector<Observation> instant_;
};

}  // namespace stealthsim
