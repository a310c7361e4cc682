#include "stealthsim/rttp.hpp"

#include <algorithm>

#include "stealthsim/budget.hpp"
#include "stealthsim/error.hpp"

namespace stealthsim {

std::string_view to_string(RttpMode m) {
  return m == RttpMode::hold_acks ? "hold_acks" : "buffer_data";
}

std::optional<RttpMode> parse_rttp_mode(std::string_view s) {
  if (s == "hold_acks") {
    return RttpMode::hold_acks;
  }
  if (s == "buffer_data") {
    return RttpMode::buffer_data;
  }
  return std::nullopt;
}

DelayEstimator::DelayEstimator(std::uint64_t alpha_num, std::uint64_t alpha_den)
    : num_(alpha_num), den_(alpha_den) {
  if (den_ == 0 || num_ == 0 || num_ > den_) {
    throw ConfigError("estimator alpha must lie in (0, 1]");
  }
}

void DelayEstimator::seed(SimTime srtt) {
  srtt_ = srtt;
  initialized_ = true;
}

SimTime DelayEstimator::update(SimTime sample) {
  if (sample.ticks() == 0) {
    throw ConfigError("delay sample must be > 0");
  }
  if (!initialized_) {
    seed(sample);
    return srtt_;
  }
  const detail::u128 acc = static_cast<detail::u128>(den_ - num_) * srtt_.ticks() +
                                static_cast<detail::u128>(num_) * sample.ticks();
  srtt_ = SimTime{static_cast<SimTime::rep>((acc + den_ / 2) / den_)};
  return srtt_;
}

void InnerSeqTracker::forwarded(SeqNo seq) {
  if (seq < next_) {
    return;
  }
  if (seq > next_) {
    above_.insert(seq);
    return;
  }
  ++next_;
  while (!above_.empty() && *above_.begin() == next_) {
    above_.erase(above_.begin());
    ++next_;
  }
}

RttpGateway::RttpGateway(const RttpConfig& cfg)
    : cfg_(cfg), st_{DelayEstimator{cfg.alpha_num, cfg.alpha_den}, {}, {}, {}, {}, {}, {}, {}, {}} {
  if (!(cfg_.guard > 0.0) || cfg_.guard > 1.0) {
    throw ConfigError("rttp guard must lie in (0, 1]");
  }
  if (cfg_.capacity == 0) {
    throw ConfigError("rttp capacity must be >= 1");
  }
}

bool RttpGateway::suspicious_delay(SimTime delay) const {
  if (!st_.typical.initialized()) {
    return false;
  }
  return static_cast<double>(delay.ticks()) < cfg_.guard * static_cast<double>(st_.typical.srtt().ticks());
}

void RttpGateway::clear_alert() {
  st_.alert = false;
  st_.timer.reset();
}

std::vector<Segment> RttpGateway::drain_data(SeqNo expected) {
  std::vector<Segment> out;
  while (!st_.held_data.empty() && st_.held_data.front().seq <= expected) {
    if (st_.held_data.front().seq == expected) {
      ++expected;
    }
    out.push_back(st_.held_data.front());
    st_.held_data.pop_front();
  }
  return out;
}

IncomingResult RttpGateway::on_incoming(const EspPacket& pkt, SimTime now, SeqNo expected_inner) {
  IncomingResult res;
  const Segment& seg = pkt.inner();
  if (!seg.is_data()) {
    res.forward.push_back(seg);
    return res;
  }
  const SimTime delay = now - pkt.stamped_at();

  if (cfg_.mode == RttpMode::hold_acks) {
    if (st_.alert && st_.ack_sn && seg.seq == *st_.ack_sn) {
      res.discarded_held = !st_.held_acks.empty();
      stats_.discarded += st_.held_acks.size();
      st_.held_acks.clear();
      res.cancel_timer = st_.timer.has_value();
      clear_alert();
    } else if (suspicious_delay(delay) && seg.seq > expected_inner) {
      if (st_.alert) {
        ++stats_.collisions;
      }
      ++stats_.alerts;
      st_.alert = true;
      st_.pkt_sn = seg.seq;
      st_.rcpt_time = now;
      res.suspicious = true;
    }
    if (!res.suspicious && delay.ticks() > 0) {
      st_.typical.update(delay);
      ++stats_.estimator_samples;
    }
    res.forward.push_back(seg);
    return res;
  }

  // buffer_data
  if (suspicious_delay(delay) && seg.seq > expected_inner) {
    if (st_.alert) {
      ++stats_.collisions;
    }
    ++stats_.alerts;
    ++stats_.buffered_data;
    st_.alert = true;
    st_.pkt_sn = seg.seq;
    st_.rcpt_time = now;
    res.suspicious = true;
    auto pos = std::upper_bound(st_.held_data.begin(), st_.held_data.end(), seg,
                                [](const Segment& a, const Segment& b) { return a.seq < b.seq; });
    st_.held_data.insert(pos, seg);
    if (!st_.timer) {
      st_.timer = now + st_.typical.srtt();
      res.arm_timer = st_.timer;
    }
    return res;
  }
  if (delay.ticks() > 0) {
    st_.typical.update(delay);
    ++stats_.estimator_samples;
  }
  res.forward.push_back(seg);
  const SeqNo after = seg.seq == expected_inner ? expected_inner + 1 : expected_inner;
  auto released = drain_data(after);
  stats_.released += released.size();
  res.forward.insert(res.forward.end(), released.begin(), released.end());
  if (st_.alert && st_.held_data.empty()) {
    res.cancel_timer = st_.timer.has_value();
    clear_alert();
  }
  return res;
}

OutgoingResult RttpGateway::on_outgoing_ack(const Segment& ack, SimTime now) {
  (void)now;
  OutgoingResult res;
  if (cfg_.mode == RttpMode::buffer_data) {
    res.forward.push_back(ack);
    return res;
  }
  if (st_.ack_sn && ack.ack_num == *st_.ack_sn) {
    ++st_.dup_ack_count;
    if (st_.alert) {
      if (st_.held_acks.size() >= cfg_.capacity) {
        ++stats_.overflows;
        res.overflow = true;
        res.forward.assign(st_.held_acks.begin(), st_.held_acks.end());
        stats_.released += st_.held_acks.size();
        st_.held_acks.clear();
        res.forward.push_back(ack);
        res.cancel_timer = st_.timer.has_value();
        clear_alert();
        return res;
      }
      st_.held_acks.push_back(ack);
      ++stats_.held;
      res.held = true;
      if (!st_.timer) {
        st_.timer = st_.rcpt_time + st_.typical.srtt();
        res.arm_timer = st_.timer;
      }
      return res;
    }
    res.forward.push_back(ack);
    return res;
  }
  if (!st_.held_acks.empty()) {
    // The cumulative ACK moved on, so the quarantined duplicates are moot.
    stats_.discarded += st_.held_acks.size();
    st_.held_acks.clear();
    res.cancel_timer = st_.timer.has_value();
    clear_alert();
  }
  st_.ack_sn = ack.ack_num;
  st_.dup_ack_count = 0;
  res.forward.push_back(ack);
  return res;
}

std::vector<Segment> RttpGateway::on_timer(SimTime now) {
  (void)now;
  std::vector<Segment> out(st_.held_acks.begin(), st_.held_acks.end());
  out.insert(out.end(), st_.held_data.begin(), st_.held_data.end());
  stats_.released += out.size();
  st_.held_acks.clear();
  st_.held_data.clear();
  clear_alert();
  return out;
}

}  // namespace stealthsim
