#include "stealthsim/event_queue.hpp"

#include <exception>
#include <sstream>

#include "stealthsim/error.hpp"

namespace stealthsim {

EventHandle EventQueue::schedule(SimTime at, EndpointId target, std::function<void()> action) {
  if (at < now_) {
    std::ostringstream msg;
    msg << "cannot schedule event at " << at << " before current time " << now_;
    throw ConfigError(msg.str());
  }
  const std::uint64_t seq = next_seq_++;
  events_.emplace(Key{at, seq}, Event{at, seq, target, std::move(action)});
  return EventHandle{at, seq};
}

bool EventQueue::cancel(const EventHandle& h) {
  return events_.erase(Key{h.fire_at, h.seq_no}) > 0;
}

std::uint64_t EventQueue::run_until(SimTime t_end) {
  std::uint64_t count = 0;
  while (!events_.empty()) {
    auto it = events_.begin();
    if (it->first.first > t_end) {
      break;
    }
    Event ev = std::move(it->second);
    events_.erase(it);
    now_ = ev.fire_at;
    if (hook_) {
      hook_(ev);
    }
    try {
      if (ev.action) {
        ev.action();
      }
    } catch (const SimulationError&) {
      throw;
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "event #" << ev.seq_no << " (target " << ev.target << ") at " << ev.fire_at
          << ": " << e.what();
      throw SimulationError(msg.str());
    }
    ++count;
    ++dispatched_;
  }
  if (t_end > now_) {
    now_ = t_end;
  }
  return count;
}

}  // namespace stealthsim
