#pragma once

#include <cstdint>

#include "stealthsim/sim_time.hpp"

namespace stealthsim::analytics {

/// Which closed form to use where two variants are in circulation.
/// `derived` follows the algebra; `stated` uses the alternate published form.
enum class Variant : std::uint8_t { derived, stated };

struct AttackParams {
  SimTime T{};
  SimTime rtt{};
  double cwnd0 = 0.0;
  std::uint64_t W = 0;
  std::uint64_t mss = 1000;
  double R = 0.0;  // bytes per second
  SimTime d_prop{};
  std::uint64_t L = 1000;
};

/// 2T/rtt, in MSS.
double steady_state_cwnd_max(SimTime T, SimTime rtt);

/// 2(T/rtt + 1), in MSS: the maximum under the three-packet reordering
/// attack, where the window is not reset by a retransmission timeout.
double steady_state_cwnd_max_reorder(SimTime T, SimTime rtt);

/// Same bound written with the adversary rate: 6/(rho*rtt) for T = 3/rho.
double steady_state_cwnd_max_rho(double rho_per_s, SimTime rtt);

/// Average steady-state cwnd, 3T/(2rtt) MSS.
double steady_state_cwnd_avg(SimTime T, SimTime rtt);

/// Bytes per second. derived: 3T/(2rtt^2)*mss. stated: 2T/rtt^2*mss.
double steady_state_throughput(SimTime T, SimTime rtt, std::uint64_t mss,
                               Variant v = Variant::derived);

/// ceil(log2(cwnd0 - 2T/rtt - 2) - 1). Throws DomainError unless the log
/// argument exceeds 1.
std::int64_t epochs_to_steady_state(double cwnd0, SimTime T, SimTime rtt);

/// floor(cwnd/2) - 1 > W. Throws DomainError for cwnd < 1 or W < 1.
bool rto_feasible(double cwnd, std::uint64_t W);

/// ceil(R * d_prop / L) packets. Throws DomainError for non-positive input.
std::uint64_t required_window_size(double R, SimTime d_prop, std::uint64_t L);

/// cwnd_i < cwnd_{i+1} + 1.
bool steady_state_condition(double cwnd_i, double cwnd_next);

}  // namespace stealthsim::analytics
