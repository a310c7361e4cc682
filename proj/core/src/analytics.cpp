#include "stealthsim/analytics.hpp"

#include <cmath>

#include "stealthsim/error.hpp"

namespace stealthsim::analytics {

namespace {

void require_positive(SimTime T, SimTime rtt) {
  if (T.ticks() == 0 || rtt.ticks() == 0) {
    throw DomainError("T and rtt must be > 0");
  }
}

double ratio(SimTime a, SimTime b) {
  return static_cast<double>(a.ticks()) / static_cast<double>(b.ticks());
}

}  // namespace

double steady_state_cwnd_max(SimTime T, SimTime rtt) {
  require_positive(T, rtt);
  return 2.0 * ratio(T, rtt);
}

double steady_state_cwnd_max_reorder(SimTime T, SimTime rtt) {
  require_positive(T, rtt);
  return 2.0 * (ratio(T, rtt) + 1.0);
}

double steady_state_cwnd_max_rho(double rho_per_s, SimTime rtt) {
  if (!(rho_per_s > 0.0) || rtt.ticks() == 0) {
    throw DomainError("rho and rtt must be > 0");
  }
  return 6.0 / (rho_per_s * rtt.seconds());
}

double steady_state_cwnd_avg(SimTime T, SimTime rtt) {
  require_positive(T, rtt);
  return 1.5 * ratio(T, rtt);
}

double steady_state_throughput(SimTime T, SimTime rtt, std::uint64_t mss, Variant v) {
  require_positive(T, rtt);
  const double factor = v == Variant::derived ? 1.5 : 2.0;
  return factor * ratio(T, rtt) / rtt.seconds() * static_cast<double>(mss);
}

std::int64_t epochs_to_steady_state(double cwnd0, SimTime T, SimTime rtt) {
  require_positive(T, rtt);
  const double arg = cwnd0 - 2.0 * ratio(T, rtt) - 2.0;
  if (!(arg > 1.0)) {
    throw DomainError("epoch bound needs cwnd0 - 2T/rtt - 2 > 1");
  }
  return static_cast<std::int64_t>(std::ceil(std::log2(arg) - 1.0));
}

bool rto_feasible(double cwnd, std::uint64_t W) {
  if (cwnd < 1.0 || W < 1) {
    throw DomainError("rto_feasible needs cwnd >= 1 and W >= 1");
  }
  const auto half = static_cast<std::int64_t>(std::floor(cwnd / 2.0));
  return half - 1 > static_cast<std::int64_t>(W);
}

std::uint64_t required_window_size(double R, SimTime d_prop, std::uint64_t L) {
  if (!(R > 0.0) || d_prop.ticks() == 0 || L == 0) {
    throw DomainError("required_window_size needs R, d_prop, L > 0");
  }
  // R * d_prop in bytes, with d_prop in microseconds.
  const long double bytes = static_cast<long double>(R) * static_cast<long double>(d_prop.ticks()) / 1e6L;
  const long double n = bytes / static_cast<long double>(L);
  const long double rounded = std::nearbyint(n);
  if (std::fabs(n - rounded) < 1e-9L) {
    return static_cast<std::uint64_t>(rounded);
  }
  return static_cast<std::uint64_t>(std::ceil(n));
}

bool steady_state_condition(double cwnd_i, double cwnd_next) {
  if (!(cwnd_i > 0.0) || !(cwnd_next > 0.0)) {
    throw DomainError("steady_state_condition needs positive windows");
  }
  return cwnd_i < cwnd_next + 1.0;
}

}  // namespace stealthsim::analytics
