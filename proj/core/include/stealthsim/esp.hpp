#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string_view>

#include "stealthsim/anti_replay.hpp"
#include "stealthsim/segment.hpp"
#include "stealthsim/sim_time.hpp"

namespace stealthsim {

using SaId = std::uint32_t;

/// Tunnel packet. Only a SecurityAssociation can build one and nothing can
/// modify it afterwards, which is how authentication is modelled: anyone
/// else, the adversary included, can only hold references to packets that
/// were really sent.
class EspPacket {
public:
  [[nodiscard]] EspSeq esp_seq() const { return esp_seq_; }
  [[nodiscard]] const Segment& inner() const { return inner_; }
  [[nodiscard]] SimTime stamped_at() const { return stamped_at_; }
  [[nodiscard]] SaId sa_id() const { return sa_id_; }
  [[nodiscard]] std::size_t wire_size() const { return wire_size_; }

private:
  friend class SecurityAssociation;
  EspPacket(EspSeq seq, const Segment& inner, SimTime stamped_at, SaId sa, std::size_t wire_size)
      : esp_seq_(seq), inner_(inner), stamped_at_(stamped_at), sa_id_(sa), wire_size_(wire_size) {}

  EspSeq esp_seq_;
  Segment inner_;
  SimTime stamped_at_;
  SaId sa_id_;
  std::size_t wire_size_;
};

using EspPacketRef = std::shared_ptr<const EspPacket>;

/// Outbound SA state: a strictly increasing sequence counter.
class SecurityAssociation {
public:
  static constexpr EspSeq max_seq = 0xFFFFFFFFULL;

  explicit SecurityAssociation(SaId id) : id_(id) {}

  /// Assigns the next sequence number and stamps the packet with `now`.
  /// Throws ConfigError when the 32-bit sequence space is exhausted.
  EspPacketRef encapsulate(const Segment& seg, SimTime now, std::size_t wire_size);

  [[nodiscard]] SaId id() const { return id_; }
  [[nodiscard]] EspSeq last_seq() const { return last_; }

private:
  SaId id_;
  EspSeq last_ = 0;
};

enum class SaPolicy : std::uint8_t { single, per_flow };

constexpr std::string_view to_string(SaPolicy p) {
  return p == SaPolicy::single ? "single" : "per_flow";
}

/// Outbound side of a gateway: one SA for everything, or one per flow.
class OutboundSaTable {
public:
  OutboundSaTable(SaPolicy policy, SaId base_id) : policy_(policy), base_(base_id) {}

  EspPacketRef encapsulate(const Segment& seg, SimTime now, std::size_t wire_size);

  [[nodiscard]] SaPolicy policy() const { return policy_; }

private:
  SecurityAssociation& sa_for(FlowId flow);

  SaPolicy policy_;
  SaId base_;
  std::map<FlowId, SecurityAssociation> sas_;
};

/// Inbound side of a gateway: one anti-replay window per SA id.
class InboundSaTable {
public:
  explicit InboundSaTable(std::uint64_t window_width) : width_(window_width) {}

  ReplayVerdict check(const EspPacket& pkt);
  [[nodiscard]] const AntiReplayWindow* window(SaId sa) const;

private:
  std::uint64_t width_;
  std::map<SaId, AntiReplayWindow> windows_;
};

}  // namespace stealthsim
