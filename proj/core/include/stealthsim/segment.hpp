#pragma once

#include <cstdint>
#include <string_view>

#include "stealthsim/sim_time.hpp"

namespace stealthsim {

using FlowId = std::uint32_t;
/// Sequence numbers count whole MSS-sized segments.
using SeqNo = std::uint64_t;

enum class SegmentKind : std::uint8_t { data, ack };

/// Transport-layer unit. Data segments carry `seq`; ACKs carry the
/// cumulative next-expected sequence in `ack_num`.
struct Segment {
  SegmentKind kind = SegmentKind::data;
  SeqNo seq = 0;
  SeqNo ack_num = 0;
  FlowId flow_id = 0;
  SimTime sent_at{};

  static Segment data(FlowId flow, SeqNo seq, SimTime at) {
    return Segment{SegmentKind::data, seq, 0, flow, at};
  }
  static Segment ack(FlowId flow, SeqNo next_expected, SimTime at) {
    return Segment{SegmentKind::ack, 0, next_expected, flow, at};
  }

  [[nodiscard]] bool is_data() const { return kind == SegmentKind::data; }
  [[nodiscard]] bool is_ack() const { return kind == SegmentKind::ack; }

  friend bool operator==(const Segment&, const Segment&) = default;
};

constexpr std::string_view to_string(SegmentKind k) {
  return k == SegmentKind::data ? "data" : "ack";
}

}  // namespace stealthsim
