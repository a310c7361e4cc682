#include "stealthsim/tcp_sender.hpp"

#include <algorithm>
#include <sstream>

#include "stealthsim/error.hpp"

namespace stealthsim {

TcpSender::TcpSender(const TcpConfig& cfg) : cfg_(cfg) {
  if (cfg_.initial_cwnd == 0) {
    throw ConfigError("initial cwnd must be >= 1");
  }
  if (cfg_.rto_interval.ticks() == 0) {
    throw ConfigError("rto interval must be > 0");
  }
  st_.cwnd = Window::segments(cfg_.initial_cwnd);
  st_.ssthresh = Window::segments(std::max<std::uint64_t>(cfg_.initial_ssthresh, 2));
  st_.phase = st_.cwnd >= st_.ssthresh ? Phase::congestion_avoidance : Phase::slow_start;
  st_.rto_interval = cfg_.rto_interval;
  clamp();
}

Window TcpSender::halved_ssthresh() const {
  return Window::segments(std::max<std::uint64_t>(st_.cwnd.floor() / 2, 2));
}

void TcpSender::clamp() {
  if (cfg_.max_cwnd != 0) {
    st_.cwnd = std::min(st_.cwnd, Window::segments(cfg_.max_cwnd));
  }
  st_.cwnd = std::max(st_.cwnd, Window::segments(1));
}

SenderActions TcpSender::on_ack(const Segment& ack, SimTime now) {
  SenderActions out;
  if (!ack.is_ack()) {
    throw ProtocolError("sender received a data segment");
  }
  if (ack.ack_num > st_.next_seq) {
    std::ostringstream msg;
    msg << "ACK " << ack.ack_num << " acknowledges unsent data (next_seq " << st_.next_seq << ")";
    throw ProtocolError(msg.str());
  }
  if (ack.ack_num < st_.highest_acked) {
    return out;  // stale
  }

  const Phase before = st_.phase;
  if (ack.ack_num == st_.highest_acked) {
    if (st_.pending() == 0) {
      return out;
    }
    out.duplicate_ack = true;
    ++st_.dup_ack_count;
    if (st_.phase == Phase::fast_recovery) {
      st_.cwnd.add_segments(1);
    } else if (st_.dup_ack_count == cfg_.dupack_threshold) {
      st_.ssthresh = halved_ssthresh();
      st_.cwnd = st_.ssthresh;
      st_.cwnd.add_segments(3);
      st_.phase = Phase::fast_recovery;
      out.fast_retransmit = true;
      out.transmit.push_back(Segment::data(cfg_.flow_id, st_.highest_acked, now));
    }
  } else {
    out.new_data_acked = true;
    st_.highest_acked = ack.ack_num;
    st_.dup_ack_count = 0;
    st_.rto_backoff = 1;
    switch (st_.phase) {
      case Phase::fast_recovery:
        st_.cwnd = st_.ssthresh;
        st_.phase = Phase::congestion_avoidance;
        break;
      case Phase::slow_start:
        st_.cwnd.add_segments(1);
        if (st_.cwnd >= st_.ssthresh) {
          st_.phase = Phase::congestion_avoidance;
        }
        break;
      case Phase::congestion_avoidance:
        st_.cwnd.add_reciprocal();
        break;
    }
    if (st_.pending() > 0) {
      out.timer = TimerAction::restart;
      st_.rto_armed = true;
    } else {
      out.timer = TimerAction::stop;
      st_.rto_armed = false;
    }
  }
  clamp();
  if (st_.phase != before) {
    out.phase_change = st_.phase;
  }
  emit_new(now, out);
  return out;
}

SenderActions TcpSender::on_rto(SimTime now) {
  SenderActions out;
  if (st_.pending() == 0) {
    st_.rto_armed = false;
    out.timer = TimerAction::stop;
    return out;
  }
  const Phase before = st_.phase;
  st_.ssthresh = halved_ssthresh();
  st_.cwnd = Window::segments(1);
  st_.phase = Phase::slow_start;
  st_.dup_ack_count = 0;
  st_.rto_backoff = std::min(st_.rto_backoff * 2, cfg_.max_backoff);
  st_.rto_armed = true;
  out.timeout = true;
  out.timer = TimerAction::restart;
  out.transmit.push_back(Segment::data(cfg_.flow_id, st_.highest_acked, now));
  if (st_.phase != before) {
    out.phase_change = st_.phase;
  }
  return out;
}

SenderActions TcpSender::try_send(SimTime now) {
  SenderActions out;
  emit_new(now, out);
  return out;
}

void TcpSender::emit_new(SimTime now, SenderActions& out) {
  bool sent_any = false;
  while (st_.pending() < st_.cwnd.floor()) {
    if (cfg_.transfer_segments != 0 && st_.next_seq >= cfg_.transfer_segments) {
      break;
    }
    out.transmit.push_back(Segment::data(cfg_.flow_id, st_.next_seq, now));
    ++st_.next_seq;
    sent_any = true;
  }
  if (sent_any && !st_.rto_armed) {
    st_.rto_armed = true;
    out.timer = TimerAction::restart;
  }
}

}  // namespace stealthsim
