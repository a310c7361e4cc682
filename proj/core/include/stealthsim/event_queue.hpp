#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string_view>
#include <utility>

#include "stealthsim/sim_time.hpp"

namespace stealthsim {

using EndpointId = std::uint32_t;

/// Identifies a scheduled event for cancellation. Handles stay valid after
/// the event fires; cancelling a fired event is a no-op.
struct EventHandle {
  SimTime fire_at;
  std::uint64_t seq_no = 0;
};

struct Event {
  SimTime fire_at;
  std::uint64_t seq_no = 0;
  EndpointId target = 0;
  std::function<void()> action;
};

/// Deterministic virtual-time event engine.
///
/// Events are dispatched in lexicographic (fire_at, seq_no) order, so equal
/// timestamps fire in insertion order. Handlers may schedule further events,
/// but never before the current virtual time.
class EventQueue {
public:
  using DispatchHook = std::function<void(const Event&)>;

  EventQueue() = default;
  EventQueue(const EventQueue&) = delete;
  EventQueue& operator=(const EventQueue&) = delete;

  /// Throws ConfigError if `at` lies before now().
  EventHandle schedule(SimTime at, EndpointId target, std::function<void()> action);

  /// Returns true when the event was still pending.
  bool cancel(const EventHandle& h);

  /// Dispatches every event with fire_at <= t_end and leaves the clock at
  /// t_end. Exceptions escaping a handler are rethrown as SimulationError
  /// naming the event.
  std::uint64_t run_until(SimTime t_end);

  [[nodiscard]] SimTime now() const { return now_; }
  [[nodiscard]] std::size_t pending() const { return events_.size(); }
  [[nodiscard]] std::uint64_t dispatched() const { return dispatched_; }

  void set_dispatch_hook(DispatchHook hook) { hook_ = std::move(hook); }

private:
  using Key = std::pair<SimTime, std::uint64_t>;

  std::map<Key, Event> events_;
  SimTime now_{};
  std::uint64_t next_seq_ = 0;
  std::uint64_t dispatched_ = 0;
  DispatchHook hook_;
};

}  // namespace stealthsim
