#include "stealthsim/budget.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stealthsim/error.hpp"

namespace stealthsim {

PacketRate PacketRate::per_second(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw ConfigError("adversary rate rho must be > 0");
  }
  const auto micro = static_cast<std::uint64_t>(std::llround(rho * 1e6));
  if (micro == 0) {
    throw ConfigError("adversary rate rho below 1e-6 packets/s");
  }
  std::uint64_t den = 1000000ULL * 1000000ULL;
  const std::uint64_t g = std::gcd(micro, den);
  return PacketRate{micro / g, den / g};
}

PacketRate PacketRate::every(std::uint64_t packets, SimTime period) {
  if (packets == 0 || period.ticks() == 0) {
    throw ConfigError("adversary rate needs packets > 0 and period > 0");
  }
  const std::uint64_t g = std::gcd(packets, period.ticks());
  return PacketRate{packets / g, period.ticks() / g};
}

AdversaryBudget::AdversaryBudget(PacketRate rho, std::uint64_t sigma)
    : rho_(rho), sigma_(sigma) {
  if (rho_.per_us == 0) {
    throw ConfigError("adversary rate denominator must be > 0");
  }
  cap_ = static_cast<detail::u128>(sigma_) * rho_.per_us;
  scaled_ = cap_;
}

void AdversaryBudget::refill(SimTime now) {
  if (now > last_) {
    const detail::u128 add =
        static_cast<detail::u128>((now - last_).ticks()) * rho_.packets;
    scaled_ = std::min(cap_, scaled_ + add);
    last_ = now;
  }
}

bool AdversaryBudget::admit(SimTime now, std::uint64_t n) {
  refill(now);
  const detail::u128 need = static_cast<detail::u128>(n) * rho_.per_us;
  if (scaled_ < need) {
    return false;
  }
  scaled_ -= need;
  return true;
}

double AdversaryBudget::tokens() const {
  return static_cast<double>(scaled_) / static_cast<double>(rho_.per_us);
}

BudgetAudit audit_budget(std::span<const SimTime> times, PacketRate rho, std::uint64_t sigma) {
  // count in [t_a, t_b] = b - a + 1 (indices into the sorted list). With
  // g(k) = k*per_us - packets*t_k the constraint is
  // g(b) - g(a) + per_us <= sigma*per_us for all a <= b.
  BudgetAudit audit;
  audit.injections = times.size();
  if (times.empty()) {
    return audit;
  }
  using detail::i128;
  const i128 per = rho.per_us;
  const i128 limit = static_cast<i128>(sigma) * per;
  i128 min_g = 0;
  i128 worst = 0;
  bool first = true;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const i128 g = static_cast<i128>(k) * per - static_cast<i128>(rho.packets) * times[k].ticks();
    if (first || g < min_g) {
      min_g = g;
      first = false;
    }
    worst = std::max(worst, g - min_g + per);
  }
  audit.sound = worst <= limit;
  audit.worst_excess = static_cast<double>(worst) / static_cast<double>(per);
  return audit;
}

}  // namespace stealthsim
