#include "stealthsim/anti_replay.hpp"

namespace stealthsim {

AntiReplayWindow::AntiReplayWindow(std::uint64_t width)
    : width_(width), bits_((width + 63) / 64, 0) {}

bool AntiReplayWindow::bit(EspSeq seq) const {
  const std::uint64_t slot = seq % width_;
  return (bits_[slot / 64] >> (slot % 64)) & 1U;
}

void AntiReplayWindow::set_bit(EspSeq seq) {
  const std::uint64_t slot = seq % width_;
  bits_[slot / 64] |= std::uint64_t{1} << (slot % 64);
}

void AntiReplayWindow::clear_bit(EspSeq seq) {
  const std::uint64_t slot = seq % width_;
  bits_[slot / 64] &= ~(std::uint64_t{1} << (slot % 64));
}

bool AntiReplayWindow::seen(EspSeq seq) const {
  if (width_ == 0 || seq == 0 || seq > right_ || right_ - seq >= width_) {
    return false;
  }
  return bit(seq);
}

ReplayVerdict AntiReplayWindow::check(EspSeq seq) {
  if (width_ == 0) {
    if (seq > right_) {
      right_ = seq;
    }
    return ReplayVerdict::accept;
  }
  if (seq == 0) {
    return ReplayVerdict::reject_left_of_window;
  }
  if (seq > right_) {
    const std::uint64_t shift = seq - right_;
    if (shift >= width_) {
      for (auto& w : bits_) {
        w = 0;
      }
    } else {
      for (EspSeq s = right_ + 1; s <= seq; ++s) {
        clear_bit(s);
      }
    }
    right_ = seq;
    set_bit(seq);
    return ReplayVerdict::accept;
  }
  if (right_ - seq >= width_) {
    return ReplayVerdict::reject_left_of_window;
  }
  if (bit(seq)) {
    return ReplayVerdict::reject_duplicate;
  }
  set_bit(seq);
  return ReplayVerdict::accept;
}

}  // namespace stealthsim
