#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "stealthsim/adversary.hpp"
#include "stealthsim/analytics.hpp"
#include "stealthsim/metrics.hpp"
#include "stealthsim/scenario.hpp"

namespace stealthsim {

enum class Verdict : std::uint8_t { pass, fail, untestable, info };

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::untestable: return "untestable";
    case Verdict::info: return "info";
  }
  return "?";
}

struct ReportRow {
  std::string name;
  double simulated = 0.0;
  double predicted = 0.0;
  std::string relation;  // e.g. "<=", "in [0.5x, 1.25x]"
  Verdict verdict = Verdict::info;
  std::string note;
};

struct ComparisonReport {
  std::vector<ReportRow> rows;
  /// Only fail rows count against the run; info and untestable do not.
  [[nodiscard]] bool all_pass() const;
};

struct CompareTolerances {
  /// Allowed excess of the steady-state maximum over 2T/rtt, in MSS.
  double max_cwnd_slack = 3.0;
  double throughput_low = 0.5;
  double throughput_high = 1.25;
  /// Epochs of detection slack on top of the epoch-count bound.
  std::int64_t epoch_slack = 1;
  /// Baseline: |throughput - avg_cwnd*mss/rtt| relative tolerance.
  double baseline_rel = 0.05;
};

/// Attack parameters implied by a scenario and its run: T is the attack
/// period, cwnd0 the window sampled before the first epoch.
analytics::AttackParams attack_params(const ScenarioConfig& cfg, const RunMetrics& m);

/// With `rttp` set the attack-model rows turn into info rows and the
/// reordering attack is instead expected to cause no fast retransmit.
ComparisonReport compare_with_model(const RunMetrics& m, const analytics::AttackParams& p, Strategy strategy,
                                    bool rttp = false, const CompareTolerances& tol = {});

/// attack_params + compare_with_model.
ComparisonReport compare_run(const ScenarioConfig& cfg, const RunMetrics& m, const CompareTolerances& tol = {});

}  // namespace stealthsim
