#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace stealthsim {

using EspSeq = std::uint64_t;

enum class ReplayVerdict : std::uint8_t { accept, reject_left_of_window, reject_duplicate };

constexpr std::string_view to_string(ReplayVerdict v) {
  switch (v) {
    case ReplayVerdict::accept: return "accept";
    case ReplayVerdict::reject_left_of_window: return "left_of_window";
    case ReplayVerdict::reject_duplicate: return "duplicate";
  }
  return "?";
}

/// Sliding anti-replay window over ESP sequence numbers.
///
/// Covers [right_edge - W + 1, right_edge]. Numbers above the right edge
/// advance the window; numbers inside it are accepted once; numbers at or
/// below right_edge - W are rejected. Width 0 disables the check entirely
/// and every arrival, duplicates included, is accepted. Sequence number 0
/// is never valid and is reported as left of the window.
class AntiReplayWindow {
public:
  explicit AntiReplayWindow(std::uint64_t width = 64);

  ReplayVerdict check(EspSeq seq);

  [[nodiscard]] std::uint64_t width() const { return width_; }
  [[nodiscard]] EspSeq right_edge() const { return right_; }
  [[nodiscard]] bool seen(EspSeq seq) const;

private:
  [[nodiscard]] bool bit(EspSeq seq) const;
  void set_bit(EspSeq seq);
  void clear_bit(EspSeq seq);

  std::uint64_t width_;
  EspSeq right_ = 0;
  std::vector<std::uint64_t> bits_;  // ring indexed by seq % width
};

}  // namespace stealthsim
