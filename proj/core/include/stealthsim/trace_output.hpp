#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "stealthsim/compare.hpp"
#include "stealthsim/metrics.hpp"

namespace stealthsim {

enum class TraceLevel : std::uint8_t { off, summary, full };

std::string_view to_string(TraceLevel l);
std::optional<TraceLevel> parse_trace_level(std::string_view s);

/// Columns: time_us, cwnd_mss_fixedpoint, phase, event. The fixed-point
/// column is Window::raw(), i.e. cwnd * 65536.
std::string trace_csv(const RunMetrics& m);

/// Every scalar metric, the epoch samples and the comparison report, in a
/// fixed key order.
std::string summary_json(const RunMetrics& m, const ComparisonReport& report);

/// Reads back what summary_json wrote: scalars and epoch samples. The trace
/// and injection log are not part of the summary and stay empty.
RunMetrics metrics_from_summary(std::string_view json_text);

}  // namespace stealthsim
