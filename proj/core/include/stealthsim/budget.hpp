#pragma once

#include <cstdint>
#include <span>

#include "stealthsim/sim_time.hpp"

namespace stealthsim {

namespace detail {
__extension__ typedef unsigned __int128 u128;
__extension__ typedef __int128 i128;
}  // namespace detail

/// Exact rational packet rate: `packets` per `per_us` microseconds.
struct PacketRate {
  std::uint64_t packets = 0;
  std::uint64_t per_us = 1;

  /// Rate given in packets per second, rounded to 1e-6 packet/s.
  static PacketRate per_second(double rho);
  /// `packets` every `period`.
  static PacketRate every(std::uint64_t packets, SimTime period);

  [[nodiscard]] double per_second_value() const {
    return static_cast<double>(packets) * 1e6 / static_cast<double>(per_us);
  }
};

/// (rho, sigma) leaky bucket gating adversary injections. Starts full.
/// Token arithmetic is done in units of 1/per_us packet, so it is exact.
class AdversaryBudget {
public:
  AdversaryBudget(PacketRate rho, std::uint64_t sigma);

  /// Refills for the elapsed time, then grants and deducts iff n tokens
  /// are available.
  bool admit(SimTime now, std::uint64_t n);

  [[nodiscard]] double tokens() const;
  [[nodiscard]] SimTime last_refill() const { return last_; }
  [[nodiscard]] PacketRate rho() const { return rho_; }
  [[nodiscard]] std::uint64_t sigma() const { return sigma_; }

private:
  void refill(SimTime now);

  PacketRate rho_;
  std::uint64_t sigma_;
  detail::u128 scaled_;  // tokens * per_us
  detail::u128 cap_;
  SimTime last_{};
};

struct BudgetAudit {
  bool sound = true;
  std::uint64_t injections = 0;
  /// Largest count observed in any closed window [a, b], minus rho*(b-a).
  double worst_excess = 0.0;
};

/// Post-hoc check that for every closed interval [a, b] the number of
/// injections is at most rho*(b - a) + sigma. `times` must be sorted. O(n).
BudgetAudit audit_budget(std::span<const SimTime> times, PacketRate rho, std::uint64_t sigma);

}  // namespace stealthsim
