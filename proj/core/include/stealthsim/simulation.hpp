#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "stealthsim/metrics.hpp"
#include "stealthsim/scenario.hpp"

namespace stealthsim {

struct RunOptions {
  /// Keep the per-ACK cwnd trace in the returned metrics.
  bool keep_trace = true;
};

/// Runs one scenario to t_end. Deterministic: the same config always yields
/// the same metrics. Internal failures surface as SimulationError carrying
/// the event being dispatched.
RunMetrics run_scenario(const ScenarioConfig& cfg, const RunOptions& opts = {});

/// First epoch index i at which cwnd_i < cwnd_{i+1} + 1 holds for the
/// `span` consecutive pairs starting at i.
std::optional<std::uint64_t> detect_steady_state(std::span<const EpochSample> samples, std::size_t span = 3);

}  // namespace stealthsim
