#include "stealthsim/esp.hpp"

#include "stealthsim/error.hpp"

namespace stealthsim {

EspPacketRef SecurityAssociation::encapsulate(const Segment& seg, SimTime now,
                                              std::size_t wire_size) {
  if (last_ >= max_seq) {
    throw ConfigError("ESP sequence number space exhausted");
  }
  ++last_;
  // make_shared cannot reach the private constructor
  return EspPacketRef(new EspPacket(last_, seg, now, id_, wire_size));
}

SecurityAssociation& OutboundSaTable::sa_for(FlowId flow) {
  const FlowId key = policy_ == SaPolicy::single ? 0 : flow;
  auto it = sas_.find(key);
  if (it == sas_.end()) {
    const SaId id = policy_ == SaPolicy::single ? base_ : base_ + 1 + flow;
    it = sas_.emplace(key, SecurityAssociation{id}).first;
  }
  return it->second;
}

EspPacketRef OutboundSaTable::encapsulate(const Segment& seg, SimTime now,
                                          std::size_t wire_size) {
  return sa_for(seg.flow_id).encapsulate(seg, now, wire_size);
}

ReplayVerdict InboundSaTable::check(const EspPacket& pkt) {
  auto it = windows_.find(pkt.sa_id());
  if (it == windows_.end()) {
    it = windows_.emplace(pkt.sa_id(), AntiReplayWindow{width_}).first;
  }
  return it->second.check(pkt.esp_seq());
}

const AntiReplayWindow* InboundSaTable::window(SaId sa) const {
  auto it = windows_.find(sa);
  return it == windows_.end() ? nullptr : &it->second;
}

}  // namespace stealthsim
