#include "stealthsim/link.hpp"

#include <algorithm>
#include <utility>

#include "stealthsim/error.hpp"

namespace stealthsim {

Link::Link(EndpointId from, EndpointId to, SimTime propagation_delay,
           std::uint64_t rate_bytes_per_s, bool serialize)
    : from_(from), to_(to), prop_(propagation_delay), rate_(rate_bytes_per_s),
      serialize_(serialize) {
  if (prop_.ticks() == 0) {
    throw ConfigError("link propagation delay must be > 0");
  }
  if (rate_ == 0) {
    throw ConfigError("link transmission rate must be > 0");
  }
}

SimTime Link::transmission_time(std::size_t size_bytes) const {
  // ceil(size * 1e6 / rate) microseconds
  const std::uint64_t num = static_cast<std::uint64_t>(size_bytes) * 1000000ULL;
  return SimTime{(num + rate_ - 1) / rate_};
}

Link::Timing Link::transmit(std::size_t size_bytes, SimTime sent_at) {
  if (size_bytes == 0) {
    throw ConfigError("cannot transmit a zero-sized packet");
  }
  SimTime start = sent_at;
  if (serialize_) {
    start = std::max(sent_at, busy_until_);
  }
  const SimTime departed = start + transmission_time(size_bytes);
  if (serialize_) {
    busy_until_ = departed;
  }
  last_arrival_ = std::max(last_arrival_, departed + prop_);
  return Timing{departed, last_arrival_};
}

SimTime Link::deliver(EventQueue& queue, std::size_t size_bytes, SimTime sent_at,
                      std::function<void()> on_arrival) {
  const Timing t = transmit(size_bytes, sent_at);
  queue.schedule(t.arrival, to_, std::move(on_arrival));
  return t.arrival;
}

}  // namespace stealthsim
