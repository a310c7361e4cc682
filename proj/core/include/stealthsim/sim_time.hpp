#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>

namespace stealthsim {

/// Virtual time in integer microseconds.
///
/// Subtraction saturates at zero: virtual time is never negative, and the
/// only places that subtract are delay computations where the minuend is
/// known to be later.
class SimTime {
public:
  using rep = std::uint64_t;

  constexpr SimTime() = default;
  constexpr explicit SimTime(rep ticks) : ticks_(ticks) {}

  [[nodiscard]] constexpr rep ticks() const { return ticks_; }
  [[nodiscard]] constexpr double seconds() const { return static_cast<double>(ticks_) * 1e-6; }

  static constexpr SimTime max() { return SimTime{std::numeric_limits<rep>::max()}; }

  static constexpr SimTime from_us(rep us) { return SimTime{us}; }
  static constexpr SimTime from_ms(rep ms) { return SimTime{ms * 1000}; }
  static constexpr SimTime from_s(rep s) { return SimTime{s * 1000000}; }

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime& operator+=(SimTime o) {
    ticks_ += o.ticks_;
    return *this;
  }
  friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime{a.ticks_ + b.ticks_}; }
  friend constexpr SimTime operator-(SimTime a, SimTime b) {
    return SimTime{a.ticks_ > b.ticks_ ? a.ticks_ - b.ticks_ : 0};
  }
  friend constexpr SimTime operator*(SimTime a, rep k) { return SimTime{a.ticks_ * k}; }
  friend constexpr SimTime operator/(SimTime a, rep k) { return SimTime{a.ticks_ / k}; }

  friend std::ostream& operator<<(std::ostream& os, SimTime t) { return os << t.ticks_ << "us"; }

private:
  rep ticks_ = 0;
};

inline namespace literals {
constexpr SimTime operator""_us(unsigned long long v) { return SimTime::from_us(v); }
constexpr SimTime operator""_ms(unsigned long long v) { return SimTime::from_ms(v); }
constexpr SimTime operator""_s(unsigned long long v) { return SimTime::from_s(v); }
}  // namespace literals

}  // namespace stealthsim
