#pragma once

#include <cstdint>
#include <set>

#include "stealthsim/segment.hpp"

namespace stealthsim {

struct TcpReceiverState {
  SeqNo next_expected = 0;
  std::set<SeqNo> out_of_order;  // every element > next_expected
};

/// Receiver that ACKs every segment immediately (no delayed ACKs) with the
/// cumulative next-expected sequence number. Out-of-order and duplicate
/// segments produce duplicate ACKs.
class TcpReceiver {
public:
  explicit TcpReceiver(FlowId flow = 0, SeqNo initial_expected = 0);

  Segment on_segment(const Segment& seg, SimTime now);

  [[nodiscard]] const TcpReceiverState& state() const { return st_; }
  [[nodiscard]] std::uint64_t duplicates_received() const { return duplicates_; }
  [[nodiscard]] std::uint64_t out_of_order_received() const { return out_of_order_; }

private:
  FlowId flow_;
  TcpReceiverState st_;
  std::uint64_t duplicates_ = 0;
  std::uint64_t out_of_order_ = 0;
};

}  // namespace stealthsim
