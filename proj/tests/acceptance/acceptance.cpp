// One line per acceptance criterion. `acceptance` runs all of them,
// `acceptance N` runs criterion N only. Exit status is non-zero when any
// selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "replay_oracle.hpp"
#include "stealthsim/analytics.hpp"
#include "stealthsim/compare.hpp"
#include "stealthsim/scenario.hpp"
#include "stealthsim/simulation.hpp"
#include "stealthsim/trace_output.hpp"

namespace fs = std::filesystem;
using namespace stealthsim;
namespace an = stealthsim::analytics;

namespace {

// Pinned tolerances.
constexpr double kMaxCwndSlack = 3.0;           // MSS above 2T/rtt
constexpr double kPointRuntimeLimit = 2.0;      // seconds of wall clock per T
constexpr double kThroughputLow = 0.5;          // x model
constexpr double kThroughputHigh = 1.25;        // x model
constexpr double kAttackVsBaseline = 0.20;      // attacked / unattacked at T = rtt
constexpr std::int64_t kEpochSlack = 1;         // epochs on top of the bound
constexpr double kRttpThroughputFloor = 0.90;   // defended / unattacked
constexpr std::uint64_t kOracleDecisions = 100'000;

const fs::path kScenarios{STEALTHSIM_SCENARIO_DIR};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED(" << what << ")";
    }
  }
};

struct Loaded {
  ScenarioConfig cfg;
  RunMetrics m;
  double wall_s = 0;
};

Loaded run_file(const std::string& stem) {
  Loaded out;
  out.cfg = load_scenario_file((kScenarios / (stem + ".scn")).string());
  const auto t0 = std::chrono::steady_clock::now();
  out.m = run_scenario(out.cfg);
  out.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::string fixed(double v, int prec = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(prec);
  os << v;
  return os.str();
}

const std::vector<int> kTGrid{1, 2, 5, 10};

void window_sizing(Outcome& v) {
  const std::uint64_t n = an::required_window_size(10'000'000.0, 1_s, 1000);
  v.detail << "R=10MBps d=1s L=1000B -> " << n << " packets";
  v.require(n == 10'000, "expected exactly 10000");
}

void ack_duplication_bound(Outcome& v) {
  for (int k : kTGrid) {
    const Loaded r = run_file("ackdup_T" + std::to_string(k));
    const SimTime T = r.cfg.adversary.epoch_period;
    const SimTime rtt = r.cfg.nominal_rtt();
    const double bound = an::steady_state_cwnd_max(T, rtt) + kMaxCwndSlack;
    const double avg_model = an::steady_state_cwnd_avg(T, rtt);
    v.detail << " T=" << k << "rtt:";
    if (!r.m.steady_epoch) {
      v.detail << " no steady state";
      v.require(false, "steady state not reached at T=" + std::to_string(k) + "rtt");
      continue;
    }
    v.detail << " max " << fixed(r.m.steady_max_cwnd, 2) << "<=" << fixed(bound, 2) << " avg "
             << fixed(r.m.steady_avg_cwnd, 2);
    if (k == 1) {
      const bool nearer_model = std::fabs(r.m.steady_avg_cwnd - avg_model) <= std::fabs(r.m.steady_avg_cwnd - 3.0);
      v.detail << (nearer_model ? " (nearer 3T/(2rtt)=" : " (nearer 3 MSS than 3T/(2rtt)=") << fixed(avg_model, 2)
               << ")";
    }
    v.detail << " " << fixed(r.wall_s, 2) << "s";
    v.require(r.m.steady_max_cwnd <= bound, "max above bound at T=" + std::to_string(k) + "rtt");
    v.require(r.wall_s < kPointRuntimeLimit, "runtime at T=" + std::to_string(k) + "rtt");
  }
}

void reordering_throughput(Outcome& v) {
  const Loaded base = run_file("unattacked");
  for (int k : kTGrid) {
    const Loaded r = run_file("reorder_T" + std::to_string(k));
    const double model =
        an::steady_state_throughput(r.cfg.adversary.epoch_period, r.cfg.nominal_rtt(), r.cfg.mss);
    const double ratio = r.m.late_throughput_Bps / model;
    v.detail << " T=" << k << "rtt: " << fixed(r.m.late_throughput_Bps, 0) << "B/s = " << fixed(ratio, 2)
             << "x model";
    v.require(ratio >= kThroughputLow && ratio <= kThroughputHigh,
              "T=" + std::to_string(k) + "rtt outside [" + fixed(kThroughputLow, 2) + ", " +
                  fixed(kThroughputHigh, 2) + "]x");
    if (k == 1) {
      const double vs_base = r.m.throughput_Bps / base.m.throughput_Bps;
      v.detail << " (" << fixed(100 * vs_base, 1) << "% of unattacked)";
      v.require(vs_base <= kAttackVsBaseline, "T=1rtt above 20% of unattacked");
    }
  }
}

void epochs_to_steady(Outcome& v) {
  const std::map<int, std::string> runs{{16, "ackdup_cwnd16"}, {32, "ackdup_cwnd32"}, {64, "ackdup_T1"}};
  for (const auto& [cwnd0, stem] : runs) {
    const Loaded r = run_file(stem);
    const std::int64_t bound =
        an::epochs_to_steady_state(cwnd0, r.cfg.adversary.epoch_period, r.cfg.nominal_rtt()) + kEpochSlack;
    v.detail << " cwnd0=" << cwnd0 << ":";
    if (!r.m.steady_epoch) {
      v.detail << " never steady";
      v.require(false, "no steady state for cwnd0=" + std::to_string(cwnd0));
      continue;
    }
    v.detail << " epoch " << *r.m.steady_epoch << "<=" << bound;
    v.require(static_cast<std::int64_t>(*r.m.steady_epoch) <= bound, "cwnd0=" + std::to_string(cwnd0));
  }
}

void small_window_rto(Outcome& v) {
  const Loaded a = run_file("smallwin_rto");
  const std::uint64_t W = a.cfg.anti_replay_window;
  const double cwnd0 = a.m.epoch_samples.empty() ? 0.0 : a.m.epoch_samples.front().cwnd;
  std::uint64_t epochs_before_rto = 0;
  for (const auto& e : a.m.epoch_samples) {
    if (a.m.first_rto_at && e.at <= *a.m.first_rto_at) {
      ++epochs_before_rto;
    }
  }
  v.detail << " W=" << W << " cwnd0=" << fixed(cwnd0, 1) << " feasible=" << an::rto_feasible(cwnd0, W)
           << " rtos=" << a.m.rtos << " epochs before first RTO=" << epochs_before_rto;
  v.require(an::rto_feasible(cwnd0, W), "condition should hold for scenario A");
  v.require(a.m.rtos >= 1 && epochs_before_rto <= 2, "no RTO within 2 epochs");

  const Loaded b = run_file("smallwin_capped");
  v.detail << "; capped at " << b.cfg.tcp_max_cwnd << ": feasible=" << an::rto_feasible(b.cfg.tcp_max_cwnd, W)
           << " rtos=" << b.m.rtos << " fast retransmits=" << b.m.fast_retransmits;
  v.require(!an::rto_feasible(static_cast<double>(b.cfg.tcp_max_cwnd), W), "condition should fail for scenario B");
  v.require(b.m.rtos == 0, "capped run timed out");
  v.require(b.m.fast_retransmits >= 1, "capped run was not degraded at all");
}

void sufficient_window(Outcome& v) {
  const Loaded r = run_file("sufficient_window");
  const std::uint64_t need =
      an::required_window_size(static_cast<double>(r.cfg.rate), r.cfg.one_way_delay, r.cfg.mss);
  v.detail << " W=" << r.cfg.anti_replay_window << " required=" << need
           << " legit drops=" << r.m.legit_drops.total() << " fast retransmits=" << r.m.fast_retransmits;
  v.require(r.cfg.anti_replay_window == need, "scenario W differs from required window");
  v.require(r.m.legit_drops.total() == 0, "legitimate packets dropped");
  v.require(r.m.fast_retransmits == 0, "sender fast-retransmitted");
}

void rttp_checks(Outcome& v) {
  const Loaded base = run_file("unattacked");
  const Loaded def = run_file("rttp_efficacy");
  const double share = def.m.throughput_Bps / base.m.throughput_Bps;
  v.detail << " efficacy: fast retransmits=" << def.m.fast_retransmits << " throughput "
           << fixed(100 * share, 1) << "% of unattacked;";
  v.require(def.m.fast_retransmits == 0, "fast retransmit under RTTP");
  v.require(share >= kRttpThroughputFloor, "defended throughput below 90%");

  ScenarioConfig on = load_scenario_file((kScenarios / "rttp_transparency.scn").string());
  ScenarioConfig off = on;
  off.rttp.enabled = false;
  const bool same = trace_csv(run_scenario(on)) == trace_csv(run_scenario(off));
  v.detail << " transparency: traces " << (same ? "identical" : "differ") << ";";
  v.require(same, "RTTP changed an unattacked trace");

  ScenarioConfig live = load_scenario_file((kScenarios / "rttp_liveness.scn").string());
  ScenarioConfig live_off = live;
  live_off.rttp.enabled = false;
  const RunMetrics lm = run_scenario(live);
  const RunMetrics lo = run_scenario(live_off);
  if (!lm.first_fast_retransmit_at || !lo.first_fast_retransmit_at) {
    v.require(false, "genuine loss did not fast-retransmit");
    return;
  }
  const SimTime lag = *lm.first_fast_retransmit_at - *lo.first_fast_retransmit_at;
  v.detail << " liveness: fast retransmit delayed " << lag.ticks() << "us, typical delay "
           << lm.rttp_typical_delay.ticks() << "us";
  v.require(*lm.first_fast_retransmit_at >= *lo.first_fast_retransmit_at && lag <= lm.rttp_typical_delay,
            "fast retransmit delayed beyond typical delay");
}

void oracle_equivalence(Outcome& v) {
  std::mt19937_64 rng(0x5eed);
  std::uint64_t decisions = 0;
  std::uint64_t mismatches = 0;
  while (decisions < kOracleDecisions) {
    const std::uint64_t width = 1 + rng() % 128;
    AntiReplayWindow w(width);
    testing::SetReplayOracle oracle(width);
    for (EspSeq s : testing::adversarial_arrivals(rng, width, 1000)) {
      if (decisions == kOracleDecisions) {
        break;
      }
      mismatches += w.check(s) == oracle.check(s) ? 0 : 1;
      ++decisions;
    }
  }
  v.detail << " " << decisions << " decisions, " << mismatches << " mismatches";
  v.require(mismatches == 0, "bitmap disagrees with oracle");
}

std::vector<std::string> suite_stems() {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(kScenarios)) {
    if (e.path().extension() == ".scn") {
      out.push_back(e.path().stem().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void budget_soundness(Outcome& v) {
  std::uint64_t traces = 0;
  std::uint64_t injections = 0;
  for (const auto& stem : suite_stems()) {
    const Loaded r = run_file(stem);
    if (r.m.injection_log.empty()) {
      continue;
    }
    ++traces;
    std::vector<SimTime> t;
    for (const auto& i : r.m.injection_log) {
      t.push_back(i.injected_at);
    }
    std::sort(t.begin(), t.end());
    injections += t.size();
    const PacketRate rho = r.m.budget_rho;
    const auto sigma = static_cast<unsigned __int128>(r.m.budget_sigma);
    bool ok = true;
    // count(a..b) <= rho*(t_b - t_a) + sigma, multiplied through by per_us.
    for (std::size_t a = 0; a < t.size() && ok; ++a) {
      for (std::size_t b = a; b < t.size(); ++b) {
        const auto lhs = static_cast<unsigned __int128>(b - a + 1) * rho.per_us;
        const auto rhs = static_cast<unsigned __int128>(rho.packets) * (t[b] - t[a]).ticks() + sigma * rho.per_us;
        if (lhs > rhs) {
          ok = false;
          v.detail << " " << stem << " exceeds the budget at injection " << b << ";";
          break;
        }
      }
    }
    v.require(ok, stem);
  }
  v.detail << " " << traces << " attack traces, " << injections << " injections scanned";
  v.require(traces > 0, "no attack traces in the suite");
}

void determinism(Outcome& v) {
  std::uint64_t n = 0;
  for (const auto& stem : suite_stems()) {
    const ScenarioConfig cfg = load_scenario_file((kScenarios / (stem + ".scn")).string());
    const RunMetrics a = run_scenario(cfg);
    const RunMetrics b = run_scenario(cfg);
    const bool same = trace_csv(a) == trace_csv(b) &&
                      summary_json(a, compare_run(cfg, a)) == summary_json(b, compare_run(cfg, b));
    v.require(same, stem);
    ++n;
  }
  v.detail << " " << n << " scenarios byte-identical across two runs";
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Outcome&)> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "window sizing example", window_sizing},
      {2, "ACK duplication steady-state bound", ack_duplication_bound},
      {3, "reordering attack throughput", reordering_throughput},
      {4, "epochs to steady state", epochs_to_steady},
      {5, "small-window RTO dichotomy", small_window_rto},
      {6, "sufficient window immunity", sufficient_window},
      {7, "RTTP efficacy, transparency, liveness", rttp_checks},
      {8, "anti-replay oracle equivalence", oracle_equivalence},
      {9, "adversary budget soundness", budget_soundness},
      {10, "determinism", determinism},
  };
  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
  }
  bool all_pass = true;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) {
      continue;
    }
    Outcome v;
    try {
      c.check(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " error: " << e.what();
    }
    all_pass = all_pass && v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.name << "):" << v.detail.str()
              << std::endl;
  }
  return all_pass ? 0 : 1;
}
