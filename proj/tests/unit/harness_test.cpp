#include <cmath>
#include <set>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "stealthsim/compare.hpp"
#include "stealthsim/error.hpp"
#include "stealthsim/scenario.hpp"
#include "stealthsim/simulation.hpp"
#include "stealthsim/trace_output.hpp"

using namespace stealthsim;

namespace {

bool has_diag(const ParseError& e, const std::string& key, const std::string& needle) {
  for (const auto& d : e.diagnostics()) {
    if (d.key == key && d.message.find(needle) != std::string::npos) {
      return true;
    }
  }
  return false;
}

const ReportRow* row(const ComparisonReport& r, const std::string& name) {
  for (const auto& x : r.rows) {
    if (x.name == name) {
      return &x;
    }
  }
  return nullptr;
}

constexpr const char* kAckDup = R"(
name = ackdup
anti_replay_window = 0
tcp_initial_cwnd = 64
tcp_initial_ssthresh = 64
adversary = ack_duplicator
attack_period = 1rtt
t_end = 20s
)";

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("minimal config takes the defaults") {
  const ScenarioConfig c = parse_scenario("name = x\n");
  CHECK(c.mss == 1000);
  CHECK(c.tcp_initial_cwnd == 1);
  CHECK(c.tcp_initial_ssthresh == 64);
  CHECK(c.one_way_delay == 50_ms);
  CHECK(c.adversary.strategy == Strategy::none);
  CHECK(c.nominal_rtt() == 100'104_us);
  CHECK(c.effective_rto() == c.nominal_rtt() * 4);
  CHECK(c.effective_tap_offset() == 25_ms);
}

TEST_CASE("negative window is reported with its key and line") {
  try {
    parse_scenario("name = x\nanti_replay_window = -1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(has_diag(e, "anti_replay_window", "anti_replay_window must be >= 0"));
    CHECK(e.diagnostics().front().line == 2);
  }
}

TEST_CASE("speedup must stay below the one-way delay") {
  try {
    parse_scenario("adversary = speedup_multi\nadversary_speedup = 50ms\nattack_period = 1rtt\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(has_diag(e, "adversary_speedup", "one_way_delay"));
    CHECK(e.diagnostics().front().line == 2);
  }
}

TEST_CASE("every problem is reported at once") {
  try {
    parse_scenario("mss = 0\nbogus = 1\nrate = fast\nmss = 5\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.diagnostics().size() >= 3);
    CHECK(has_diag(e, "bogus", "unknown key"));
    CHECK(has_diag(e, "rate", ""));
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("comments and blank lines are ignored") {
  const ScenarioConfig c = parse_scenario("# header\n\nname = y  # trailing\nmss = 500B\n");
  CHECK(c.name == "y");
  CHECK(c.mss == 500);
}

TEST_CASE("durations and rates parse with units") {
  std::string err;
  CHECK(parse_duration("50ms", std::nullopt, &err) == 50_ms);
  CHECK(parse_duration("1.5s", std::nullopt, &err) == 1500_ms);
  CHECK(parse_duration("250us", std::nullopt, &err) == 250_us);
  CHECK(parse_duration("2rtt", 100_ms, &err) == 200_ms);
  CHECK_FALSE(parse_duration("2rtt", std::nullopt, &err).has_value());
  CHECK_FALSE(parse_duration("fast", std::nullopt, &err).has_value());
  CHECK(parse_rate("10MBps", &err) == 10'000'000);
  CHECK(parse_rate("500KBps", &err) == 500'000);
  CHECK(parse_rate("1000", &err) == 1000);
  CHECK_FALSE(parse_rate("0", &err).has_value());
}

TEST_CASE("attack period in rtt units uses the nominal rtt") {
  const ScenarioConfig c = parse_scenario(kAckDup);
  CHECK(c.adversary.epoch_period == c.nominal_rtt());
  CHECK(c.adversary.direction == TapDirection::client_to_server);
}

TEST_CASE("baseline throughput matches the realized window") {
  ScenarioConfig c = parse_scenario("name = base\nanti_replay_window = 10000\nt_end = 30s\n");
  const RunMetrics m = run_scenario(c);
  const ComparisonReport rep = compare_run(c, m);
  CHECK(rep.all_pass());
  REQUIRE(row(rep, "baseline_throughput_Bps") != nullptr);
  CHECK(row(rep, "baseline_throughput_Bps")->verdict == Verdict::pass);
  CHECK(m.legit_drops.total() == 0);
  CHECK(m.conservation_ok);
}

TEST_CASE("conservation holds under attack") {
  const RunMetrics m = run_scenario(parse_scenario(kAckDup));
  CHECK(m.conservation_ok);
  CHECK(m.data_transmissions == m.segments_acked + m.in_flight_at_end + m.retransmissions);
}

TEST_CASE("ACK duplication costs one fast retransmit per epoch") {
  const RunMetrics m = run_scenario(parse_scenario(kAckDup));
  const double expected = m.t_end.seconds() / m.rtt.seconds();
  CHECK(std::fabs(static_cast<double>(m.fast_retransmits) - expected) <= 0.05 * expected);
  // The final epoch's duplicates may still be in flight at t_end.
  CHECK(m.fast_retransmits <= m.adversary_epochs);
  CHECK(m.fast_retransmits + 1 >= m.adversary_epochs);
  CHECK(m.rtos == 0);
}

TEST_CASE("single speedup against a small window forces a timeout") {
  const ScenarioConfig c = parse_scenario(R"(
anti_replay_window = 8
tcp_initial_cwnd = 20
tcp_initial_ssthresh = 20
adversary = speedup_single
adversary_speedup = 10ms
attack_period = 90ms
adversary_max_epochs = 2
t_end = 10s
)");
  const RunMetrics m = run_scenario(c);
  CHECK(m.legit_drops.left_of_window >= 1);
  CHECK(m.rtos >= 1);
  for (const auto& i : m.injection_log) {
    CHECK(i.matches_observed);
  }
}

TEST_CASE("T = 5 rtt ACK duplication stays under the bound") {
  ScenarioConfig c = parse_scenario(kAckDup);
  c.adversary.epoch_period = c.nominal_rtt() * 5;
  c.t_end = SimTime::from_s(60);
  const RunMetrics m = run_scenario(c);
  const ComparisonReport rep = compare_run(c, m);
  REQUIRE(row(rep, "steady_max_cwnd") != nullptr);
  CHECK(row(rep, "steady_max_cwnd")->verdict == Verdict::pass);
  CHECK(m.steady_max_cwnd <= 13.0);
}

TEST_CASE("a start window below the epoch bound's domain is untestable, not failed") {
  ScenarioConfig c = parse_scenario(kAckDup);
  c.tcp_initial_cwnd = 4;
  c.tcp_initial_ssthresh = 4;
  const RunMetrics m = run_scenario(c);
  const ComparisonReport rep = compare_run(c, m);
  REQUIRE(row(rep, "epochs_to_steady_state") != nullptr);
  CHECK(row(rep, "epochs_to_steady_state")->verdict == Verdict::untestable);
}

TEST_CASE("steady state needs three consecutive qualifying pairs") {
  auto samples = [](std::initializer_list<double> v) {
    std::vector<EpochSample> out;
    std::uint64_t i = 0;
    for (double c : v) {
      out.push_back(EpochSample{i++, SimTime{}, c, 0});
    }
    return out;
  };
  CHECK(detect_steady_state(samples({64, 34, 18, 10, 6, 4, 3.6, 3.6, 3.6})) == 5);
  CHECK_FALSE(detect_steady_state(samples({7, 4.6, 7, 4.6, 7, 4.6})).has_value());
  CHECK_FALSE(detect_steady_state(samples({3, 3, 3})).has_value());
  CHECK(detect_steady_state(samples({3, 3, 3, 3})) == 0);
}

TEST_CASE("empty run gives a header-only csv") {
  CHECK(trace_csv(RunMetrics{}) == "time_us,cwnd_mss_fixedpoint,phase,event\n");
}

TEST_CASE("identical configs give byte-identical outputs") {
  const ScenarioConfig c = parse_scenario(kAckDup);
  const RunMetrics a = run_scenario(c);
  const RunMetrics b = run_scenario(c);
  CHECK(trace_csv(a) == trace_csv(b));
  CHECK(summary_json(a, compare_run(c, a)) == summary_json(b, compare_run(c, b)));
}

TEST_CASE("summary round-trips every scalar") {
  const ScenarioConfig c = parse_scenario(kAckDup);
  const RunMetrics m = run_scenario(c);
  const ComparisonReport rep = compare_run(c, m);
  const std::string first = summary_json(m, rep);
  const RunMetrics back = metrics_from_summary(first);
  CHECK(summary_json(back, rep) == first);
  CHECK(compare_run(c, back).all_pass() == rep.all_pass());

  const auto j = nlohmann::ordered_json::parse(first);
  std::set<std::string> keys;
  for (const auto& [k, v] : j.items()) {
    CHECK(keys.insert(k).second);
  }
  for (const char* k : {"scenario", "throughput_Bps", "fast_retransmits", "rtos", "avg_cwnd", "max_cwnd",
                        "injections", "budget_sound", "steady_epoch", "conservation_ok", "epoch_samples"}) {
    CHECK(keys.count(k) == 1);
  }
}

TEST_CASE("trace level names") {
  CHECK(parse_trace_level("off") == TraceLevel::off);
  CHECK(parse_trace_level("summary") == TraceLevel::summary);
  CHECK(parse_trace_level("full") == TraceLevel::full);
  CHECK_FALSE(parse_trace_level("verbose").has_value());
}

}
