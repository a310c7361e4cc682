#include "stealthsim/compare.hpp"

#include <cmath>
#include <sstream>

#include "stealthsim/error.hpp"

namespace stealthsim {

bool ComparisonReport::all_pass() const {
  for (const auto& r : rows) {
    if (r.verdict == Verdict::fail) {
      return false;
    }
  }
  return true;
}

analytics::AttackParams attack_params(const ScenarioConfig& cfg, const RunMetrics& m) {
  analytics::AttackParams p;
  p.T = cfg.adversary.epoch_period;
  p.rtt = cfg.nominal_rtt();
  p.cwnd0 = m.epoch_samples.empty() ? 0.0 : m.epoch_samples.front().cwnd;
  p.W = cfg.anti_replay_window;
  p.mss = cfg.mss;
  p.R = static_cast<double>(cfg.rate);
  p.d_prop = cfg.one_way_delay;
  p.L = cfg.mss;
  return p;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

void steady_rows(const RunMetrics& m, const analytics::AttackParams& p, const CompareTolerances& tol,
                 double max_model, ComparisonReport& rep) {
  const double bound = max_model + tol.max_cwnd_slack;
  const double avg_model = analytics::steady_state_cwnd_avg(p.T, p.rtt);
  const double thr_model = analytics::steady_state_throughput(p.T, p.rtt, p.mss);

  if (!m.steady_epoch) {
    rep.rows.push_back({"steady_max_cwnd", m.max_cwnd, bound, "<=", Verdict::untestable,
                        "steady state not reached before t_end"});
    rep.rows.push_back({"steady_avg_cwnd", m.avg_cwnd, avg_model, "~", Verdict::untestable,
                        "steady state not reached before t_end"});
    rep.rows.push_back({"steady_throughput_Bps", m.throughput_Bps, thr_model, "~", Verdict::untestable,
                        "steady state not reached before t_end"});
    return;
  }

  rep.rows.push_back({"steady_max_cwnd", m.steady_max_cwnd, bound, "<=",
                      m.steady_max_cwnd <= bound ? Verdict::pass : Verdict::fail,
                      "bound is " + fmt(max_model) + " + " + fmt(tol.max_cwnd_slack)});

  ReportRow avg{"steady_avg_cwnd", m.steady_avg_cwnd, avg_model, "~", Verdict::info, ""};
  if (p.T == p.rtt) {
    const double d_model = std::fabs(m.steady_avg_cwnd - avg_model);
    const double d_prose = std::fabs(m.steady_avg_cwnd - 3.0);
    avg.note = d_model <= d_prose ? "nearer 3T/(2rtt) = " + fmt(avg_model) + " than 3 MSS"
                                  : "nearer 3 MSS than 3T/(2rtt) = " + fmt(avg_model);
  } else {
    avg.note = "ratio to 3T/(2rtt): " + fmt(m.steady_avg_cwnd / avg_model);
  }
  rep.rows.push_back(avg);

  rep.rows.push_back({"steady_throughput_Bps", m.steady_throughput_Bps, thr_model, "~", Verdict::info,
                      "ratio " + fmt(m.steady_throughput_Bps / thr_model)});
}

void long_run_row(const RunMetrics& m, const analytics::AttackParams& p, const CompareTolerances& tol,
                  ComparisonReport& rep) {
  const double thr_model = analytics::steady_state_throughput(p.T, p.rtt, p.mss);
  const double lo = tol.throughput_low * thr_model;
  const double hi = tol.throughput_high * thr_model;
  const bool in_band = m.late_throughput_Bps >= lo && m.late_throughput_Bps <= hi;
  rep.rows.push_back({"long_run_throughput_Bps", m.late_throughput_Bps, thr_model,
                      "in [" + fmt(tol.throughput_low) + "x, " + fmt(tol.throughput_high) + "x]",
                      in_band ? Verdict::pass : Verdict::fail,
                      "second half of the run, ratio " + fmt(m.late_throughput_Bps / thr_model)});
}

void epoch_row(const RunMetrics& m, const analytics::AttackParams& p, const CompareTolerances& tol,
               bool gates, ComparisonReport& rep) {
  std::int64_t bound = 0;
  try {
    bound = analytics::epochs_to_steady_state(p.cwnd0, p.T, p.rtt);
  } catch (const DomainError&) {
    rep.rows.push_back({"epochs_to_steady_state", m.steady_epoch ? static_cast<double>(*m.steady_epoch) : -1.0,
                        0.0, "<=", Verdict::untestable,
                        "cwnd0 = " + fmt(p.cwnd0) + " is outside the bound's domain"});
    return;
  }
  if (!m.steady_epoch) {
    rep.rows.push_back({"epochs_to_steady_state", -1.0, static_cast<double>(bound + tol.epoch_slack), "<=",
                        Verdict::untestable, "steady state not reached before t_end"});
    return;
  }
  const auto observed = static_cast<std::int64_t>(*m.steady_epoch);
  rep.rows.push_back({"epochs_to_steady_state", static_cast<double>(observed),
                      static_cast<double>(bound + tol.epoch_slack), "<=",
                      !gates ? Verdict::info : observed <= bound + tol.epoch_slack ? Verdict::pass : Verdict::fail,
                      "bound " + std::to_string(bound) + " plus " + std::to_string(tol.epoch_slack) +
                          " epoch of detection slack"});
}

}  // namespace

ComparisonReport compare_with_model(const RunMetrics& m, const analytics::AttackParams& p, Strategy strategy,
                                    bool rttp, const CompareTolerances& tol) {
  ComparisonReport rep;
  rep.rows.push_back({"conservation", m.conservation_ok ? 1.0 : 0.0, 1.0, "==",
                      m.conservation_ok ? Verdict::pass : Verdict::fail, ""});

  switch (strategy) {
    case Strategy::none: {
      const double model = m.avg_cwnd * static_cast<double>(m.mss) / m.rtt.seconds();
      const double rel = model > 0 ? std::fabs(m.throughput_Bps - model) / model : 1.0;
      rep.rows.push_back({"baseline_throughput_Bps", m.throughput_Bps, model,
                          "within " + fmt(tol.baseline_rel * 100) + "%",
                          rel <= tol.baseline_rel ? Verdict::pass : Verdict::fail,
                          "predicted is avg_cwnd*mss/rtt"});
      try {
        const std::uint64_t need = analytics::required_window_size(p.R, p.d_prop, p.L);
        if (p.W >= need) {
          const double drops = static_cast<double>(m.legit_drops.total());
          rep.rows.push_back({"baseline_replay_drops", drops, 0.0, "==",
                              drops == 0 ? Verdict::pass : Verdict::fail,
                              "W >= required window " + std::to_string(need)});
        }
      } catch (const DomainError&) {
      }
      return rep;
    }
    case Strategy::ack_duplicator:
    case Strategy::data_duplicator:
      steady_rows(m, p, tol, analytics::steady_state_cwnd_max(p.T, p.rtt), rep);
      epoch_row(m, p, tol, true, rep);
      break;
    case Strategy::speedup_multi:
      steady_rows(m, p, tol, analytics::steady_state_cwnd_max_reorder(p.T, p.rtt), rep);
      long_run_row(m, p, tol, rep);
      epoch_row(m, p, tol, false, rep);
      break;
    case Strategy::speedup_single: {
      if (m.epoch_samples.empty() || p.W == 0) {
        rep.rows.push_back({"rto_dichotomy", static_cast<double>(m.rtos), 0.0, "-", Verdict::untestable,
                            m.epoch_samples.empty() ? "adversary never found a qualifying packet"
                                                    : "anti-replay disabled"});
        break;
      }
      const bool feasible = analytics::rto_feasible(p.cwnd0, p.W);
      const bool ok = feasible ? m.rtos >= 1 : m.rtos == 0;
      rep.rows.push_back({"rto_dichotomy", static_cast<double>(m.rtos), feasible ? 1.0 : 0.0,
                          feasible ? ">= 1" : "== 0", ok ? Verdict::pass : Verdict::fail,
                          "floor(cwnd0/2)-1 > W is " + std::string(feasible ? "true" : "false") +
                              " for cwnd0 = " + fmt(p.cwnd0)});
      break;
    }
  }

  if (rttp && strategy != Strategy::none) {
    for (auto& r : rep.rows) {
      if (r.name != "conservation" && r.verdict != Verdict::untestable) {
        r.verdict = Verdict::info;
        r.note = r.note.empty() ? "model of the undefended connection" : r.note + "; undefended model";
      }
    }
    const auto fr = static_cast<double>(m.fast_retransmits);
    rep.rows.push_back({"rttp_fast_retransmits", fr, 0.0, "==",
                        strategy == Strategy::speedup_multi ? (fr == 0 ? Verdict::pass : Verdict::fail) : Verdict::info,
                        std::to_string(m.rttp_discarded) + " held dup ACKs discarded"});
  }

  if (m.injections > 0) {
    rep.rows.push_back({"budget_soundness", m.budget_worst_excess, static_cast<double>(m.budget_sigma),
                        "<=", m.budget_sound ? Verdict::pass : Verdict::fail,
                        "worst window count minus rho*delta"});
  }
  return rep;
}

ComparisonReport compare_run(const ScenarioConfig& cfg, const RunMetrics& m, const CompareTolerances& tol) {
  return compare_with_model(m, attack_params(cfg, m), cfg.adversary.strategy, cfg.rttp.enabled, tol);
}

}  // namespace stealthsim
