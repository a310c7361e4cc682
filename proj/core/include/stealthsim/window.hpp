#pragma once

#include <compare>
#include <cstdint>

namespace stealthsim {

/// Congestion-window quantity in MSS units, fixed point with 16 fractional
/// bits. Keeps the +1/cwnd congestion-avoidance step exact across runs.
class Window {
public:
  static constexpr int frac_bits = 16;
  static constexpr std::uint64_t one = std::uint64_t{1} << frac_bits;

  constexpr Window() = default;

  static constexpr Window segments(std::uint64_t n) { return Window{n * one}; }
  static constexpr Window from_raw(std::uint64_t raw) { return Window{raw}; }
  /// Rounds to the nearest representable value.
  static Window from_double(double v);

  [[nodiscard]] constexpr std::uint64_t raw() const { return raw_; }
  [[nodiscard]] constexpr std::uint64_t floor() const { return raw_ >> frac_bits; }
  [[nodiscard]] constexpr double to_double() const {
    return static_cast<double>(raw_) / static_cast<double>(one);
  }

  /// +1/cwnd, the per-ACK congestion-avoidance increment.
  constexpr void add_reciprocal() {
    if (raw_ != 0) {
      raw_ += (one << frac_bits) / raw_;
    }
  }
  constexpr void add_segments(std::uint64_t n) { raw_ += n * one; }

  constexpr auto operator<=>(const Window&) const = default;

private:
  constexpr explicit Window(std::uint64_t raw) : raw_(raw) {}
  std::uint64_t raw_ = 0;
};

inline Window Window::from_double(double v) {
  if (v <= 0.0) {
    return Window{};
  }
  return Window{static_cast<std::uint64_t>(v * static_cast<double>(one) + 0.5)};
}

}  // namespace stealthsim
