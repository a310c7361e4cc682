#include "stealthsim/tcp_receiver.hpp"

#include "stealthsim/error.hpp"

namespace stealthsim {

TcpReceiver::TcpReceiver(FlowId flow, SeqNo initial_expected) : flow_(flow) {
  st_.next_expected = initial_expected;
}

Segment TcpReceiver::on_segment(const Segment& seg, SimTime now) {
  if (!seg.is_data()) {
    throw ProtocolError("receiver got an ACK segment");
  }
  if (seg.seq == st_.next_expected) {
    ++st_.next_expected;
    auto it = st_.out_of_order.begin();
    while (it != st_.out_of_order.end() && *it == st_.next_expected) {
      ++st_.next_expected;
      it = st_.out_of_order.erase(it);
    }
  } else if (seg.seq < st_.next_expected) {
    ++duplicates_;
  } else if (!st_.out_of_order.insert(seg.seq).second) {
    ++duplicates_;
  } else {
    ++out_of_order_;
  }
  return Segment::ack(flow_, st_.next_expected, now);
}

}  // namespace stealthsim
