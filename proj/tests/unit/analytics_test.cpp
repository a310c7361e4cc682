#include <cmath>

#include "doctest.h"
#include "stealthsim/analytics.hpp"
#include "stealthsim/error.hpp"

using namespace stealthsim;
namespace an = stealthsim::analytics;

TEST_SUITE("analytics") {

TEST_CASE("steady-state maximum is 2T/rtt") {
  CHECK(an::steady_state_cwnd_max(100_ms, 100_ms) == 2.0);
  CHECK(an::steady_state_cwnd_max(500_ms, 100_ms) == 10.0);
}

TEST_CASE("rate form equals the period form for T = 3/rho") {
  for (double rho : {0.3, 3.0, 7.5, 30.0}) {
    const auto T = SimTime{static_cast<SimTime::rep>(std::llround(3.0 / rho * 1e6))};
    CHECK(an::steady_state_cwnd_max_rho(rho, 100_ms) == doctest::Approx(an::steady_state_cwnd_max(T, 100_ms)));
  }
}

TEST_CASE("reordering maximum is 2(T/rtt + 1)") {
  CHECK(an::steady_state_cwnd_max_reorder(100_ms, 100_ms) == 4.0);
  CHECK(an::steady_state_cwnd_max_reorder(1_s, 100_ms) == 22.0);
}

TEST_CASE("throughput at T = rtt = 100 ms") {
  CHECK(an::steady_state_throughput(100_ms, 100_ms, 1000) == doctest::Approx(15'000.0));
  CHECK(an::steady_state_throughput(200_ms, 100_ms, 1000) ==
        doctest::Approx(2.0 * an::steady_state_throughput(100_ms, 100_ms, 1000)));
  CHECK(an::steady_state_throughput(100_ms, 100_ms, 1000, an::Variant::stated) == doctest::Approx(20'000.0));
}

TEST_CASE("average is three quarters of the maximum") {
  CHECK(an::steady_state_cwnd_avg(100_ms, 100_ms) == 1.5);
  CHECK(an::steady_state_cwnd_avg(700_ms, 100_ms) == doctest::Approx(0.75 * an::steady_state_cwnd_max(700_ms, 100_ms)));
}

TEST_CASE("epoch bound rounds the log outward") {
  CHECK(an::epochs_to_steady_state(64, 100_ms, 100_ms) == 5);
  CHECK(an::epochs_to_steady_state(10, 100_ms, 100_ms) == 2);
  CHECK(an::epochs_to_steady_state(16, 100_ms, 100_ms) == 3);
  CHECK(an::epochs_to_steady_state(32, 100_ms, 100_ms) == 4);
}

TEST_CASE("epoch bound outside its domain throws") {
  CHECK_THROWS_AS(an::epochs_to_steady_state(5, 100_ms, 100_ms), DomainError);
  CHECK_THROWS_AS(an::epochs_to_steady_state(3, 100_ms, 100_ms), DomainError);
  CHECK_NOTHROW(an::epochs_to_steady_state(5.5, 100_ms, 100_ms));
}

TEST_CASE("timeout feasibility") {
  CHECK(an::rto_feasible(20, 8));
  CHECK_FALSE(an::rto_feasible(18, 8));
  CHECK_FALSE(an::rto_feasible(19, 8));
  for (std::uint64_t W = 1; W < 200; ++W) {
    CHECK(an::rto_feasible(static_cast<double>(2 * W + 4), W));
  }
  CHECK_THROWS_AS(an::rto_feasible(0.5, 8), DomainError);
  CHECK_THROWS_AS(an::rto_feasible(10, 0), DomainError);
}

TEST_CASE("required window is packets in transit") {
  CHECK(an::required_window_size(1e7, 1_s, 1000) == 10'000);
  CHECK(an::required_window_size(5e6, 1_s, 1000) == 5'000);
  CHECK(an::required_window_size(1e7, 1_s, 1) == 10'000'000);
  CHECK(an::required_window_size(1e6, 50_ms, 1000) == 50);
  CHECK(an::required_window_size(1e6, 50_ms, 999) == 51);
  CHECK_THROWS_AS(an::required_window_size(0, 1_s, 1000), DomainError);
}

TEST_CASE("steady-state condition") {
  CHECK(an::steady_state_condition(10.2, 10.0));
  CHECK_FALSE(an::steady_state_condition(12, 10));
  CHECK(an::steady_state_condition(4, 4));
  CHECK_FALSE(an::steady_state_condition(11, 10));
}

TEST_CASE("scaling T and rtt together leaves window bounds unchanged") {
  for (std::uint64_t k : {2ULL, 3ULL, 10ULL}) {
    for (std::uint64_t t : {100ULL, 250ULL, 1000ULL}) {
      const SimTime T = SimTime::from_ms(t);
      CHECK(an::steady_state_cwnd_max(T * k, 100_ms * k) == doctest::Approx(an::steady_state_cwnd_max(T, 100_ms)));
      CHECK(an::steady_state_cwnd_avg(T * k, 100_ms * k) == doctest::Approx(an::steady_state_cwnd_avg(T, 100_ms)));
      CHECK(an::epochs_to_steady_state(64, T * k, 100_ms * k) == an::epochs_to_steady_state(64, T, 100_ms));
    }
  }
}

TEST_CASE("zero durations are rejected") {
  CHECK_THROWS_AS(an::steady_state_cwnd_max(0_us, 100_ms), DomainError);
  CHECK_THROWS_AS(an::steady_state_throughput(100_ms, 0_us, 1000), DomainError);
}

}
