#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "stealthsim/event_queue.hpp"
#include "stealthsim/sim_time.hpp"

namespace stealthsim {

/// Constant-delay point-to-point link.
///
/// delivery = sent_at + size/rate + propagation_delay. By default the link
/// has unlimited capacity, so packets handed over at the same instant share
/// the same delivery time and keep their hand-over order. A packet never
/// arrives before one handed over earlier, whatever their sizes. With
/// `serialize` set, transmissions queue behind each other at `rate`.
class Link {
public:
  struct Timing {
    SimTime departed;  // last bit on the wire
    SimTime arrival;
  };

  Link(EndpointId from, EndpointId to, SimTime propagation_delay, std::uint64_t rate_bytes_per_s,
       bool serialize = false);

  [[nodiscard]] SimTime transmission_time(std::size_t size_bytes) const;

  /// Computes departure/arrival for a packet and reserves the transmitter
  /// when serializing. Throws ConfigError for size 0.
  Timing transmit(std::size_t size_bytes, SimTime sent_at);

  /// transmit() plus scheduling `on_arrival` at the arrival instant.
  SimTime deliver(EventQueue& queue, std::size_t size_bytes, SimTime sent_at,
                  std::function<void()> on_arrival);

  [[nodiscard]] SimTime propagation_delay() const { return prop_; }
  [[nodiscard]] std::uint64_t rate() const { return rate_; }
  [[nodiscard]] EndpointId from() const { return from_; }
  [[nodiscard]] EndpointId to() const { return to_; }
  [[nodiscard]] bool serializing() const { return serialize_; }

private:
  EndpointId from_;
  EndpointId to_;
  SimTime prop_;
  std::uint64_t rate_;
  bool serialize_;
  SimTime busy_until_{};
  SimTime last_arrival_{};
};

}  // namespace stealthsim
