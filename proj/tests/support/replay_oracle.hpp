#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "stealthsim/anti_replay.hpp"

namespace stealthsim::testing {

/// Brute-force replay check: remembers every accepted number and the
/// largest one. Accepts iff the number is new and above max - W.
class SetReplayOracle {
public:
  explicit SetReplayOracle(std::uint64_t width) : width_(width) {}

  ReplayVerdict check(EspSeq seq) {
    if (width_ == 0) {
      return ReplayVerdict::accept;
    }
    const auto s = static_cast<std::int64_t>(seq);
    if (seq == 0 || s <= static_cast<std::int64_t>(max_) - static_cast<std::int64_t>(width_)) {
      return ReplayVerdict::reject_left_of_window;
    }
    if (!accepted_.insert(seq).second) {
      return ReplayVerdict::reject_duplicate;
    }
    max_ = std::max(max_, seq);
    return ReplayVerdict::accept;
  }

private:
  std::uint64_t width_;
  EspSeq max_ = 0;
  std::set<EspSeq> accepted_;
};

/// Arrival stream mixing in-order progress, jumps, replays of recent
/// numbers and probes around the left edge.
inline std::vector<EspSeq> adversarial_arrivals(std::mt19937_64& rng, std::uint64_t width, std::size_t n) {
  std::vector<EspSeq> out;
  out.reserve(n);
  EspSeq top = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t kind = rng() % 10;
    EspSeq s = 0;
    if (kind < 4 || top == 0) {
      s = top + 1 + rng() % 3;
    } else if (kind == 4) {
      s = top + 1 + rng() % (3 * width + 2);
    } else if (kind < 7 && !out.empty()) {
      s = out[out.size() - 1 - rng() % std::min<std::size_t>(out.size(), 2 * width + 2)];
    } else if (kind < 9) {
      const std::int64_t edge = static_cast<std::int64_t>(top) - static_cast<std::int64_t>(width);
      const std::int64_t probe = edge + static_cast<std::int64_t>(rng() % 5) - 2;
      s = probe < 0 ? 0 : static_cast<EspSeq>(probe);
    } else {
      s = top == 0 ? 0 : rng() % (top + 1);
    }
    top = std::max(top, s);
    out.push_back(s);
  }
  return out;
}

}  // namespace stealthsim::testing
