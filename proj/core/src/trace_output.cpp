#include "stealthsim/trace_output.hpp"

#include <sstream>

#include "json.hpp"
#include "stealthsim/error.hpp"

namespace stealthsim {

using ojson = nlohmann::ordered_json;

std::string_view to_string(TraceLevel l) {
  switch (l) {
    case TraceLevel::off: return "off";
    case TraceLevel::summary: return "summary";
    case TraceLevel::full: return "full";
  }
  return "?";
}

std::optional<TraceLevel> parse_trace_level(std::string_view s) {
  for (auto l : {TraceLevel::off, TraceLevel::summary, TraceLevel::full}) {
    if (to_string(l) == s) {
      return l;
    }
  }
  return std::nullopt;
}

std::string trace_csv(const RunMetrics& m) {
  std::ostringstream os;
  os << "time_us,cwnd_mss_fixedpoint,phase,event\n";
  for (const auto& s : m.trace) {
    os << s.time.ticks() << ',' << s.cwnd_raw << ',' << to_string(s.phase) << ',' << s.event << '\n';
  }
  return os.str();
}

namespace {

ojson optional_us(const std::optional<SimTime>& t) {
  return t ? ojson(t->ticks()) : ojson(nullptr);
}

ojson drops_json(const ReplayDrops& d) {
  ojson j;
  j["left_of_window"] = d.left_of_window;
  j["duplicate"] = d.duplicate;
  return j;
}

}  // namespace

std::string summary_json(const RunMetrics& m, const ComparisonReport& report) {
  ojson j;
  j["scenario"] = m.scenario;
  j["seed"] = m.seed;
  j["t_end_us"] = m.t_end.ticks();
  j["rtt_us"] = m.rtt.ticks();
  j["mss"] = m.mss;

  j["data_transmissions"] = m.data_transmissions;
  j["retransmissions"] = m.retransmissions;
  j["segments_acked"] = m.segments_acked;
  j["bytes_acked"] = m.bytes_acked;
  j["in_flight_at_end"] = m.in_flight_at_end;
  j["throughput_Bps"] = m.throughput_Bps;

  j["fast_retransmits"] = m.fast_retransmits;
  j["rtos"] = m.rtos;
  j["dup_acks_at_sender"] = m.dup_acks_at_sender;
  j["first_fast_retransmit_us"] = optional_us(m.first_fast_retransmit_at);
  j["first_rto_us"] = optional_us(m.first_rto_at);

  j["max_cwnd"] = m.max_cwnd;
  j["avg_cwnd"] = m.avg_cwnd;
  j["late_throughput_Bps"] = m.late_throughput_Bps;

  j["legit_replay_drops"] = drops_json(m.legit_drops);
  j["injected_replay_drops"] = drops_json(m.injected_drops);
  j["scripted_drops"] = m.scripted_drops;

  j["injections"] = m.injections;
  j["injections_accepted"] = m.injections_accepted;
  j["adversary_epochs"] = m.adversary_epochs;
  j["adversary_epochs_skipped"] = m.adversary_epochs_skipped;
  j["budget_rho_packets"] = m.budget_rho.packets;
  j["budget_rho_per_us"] = m.budget_rho.per_us;
  j["budget_sigma"] = m.budget_sigma;
  j["budget_sound"] = m.budget_sound;
  j["budget_worst_excess"] = m.budget_worst_excess;

  j["rttp_alerts"] = m.rttp_alerts;
  j["rttp_collisions"] = m.rttp_collisions;
  j["rttp_held"] = m.rttp_held;
  j["rttp_released"] = m.rttp_released;
  j["rttp_discarded"] = m.rttp_discarded;
  j["rttp_overflows"] = m.rttp_overflows;
  j["rttp_buffered_data"] = m.rttp_buffered_data;
  j["rttp_typical_delay_us"] = m.rttp_typical_delay.ticks();

  j["steady_epoch"] = m.steady_epoch ? ojson(*m.steady_epoch) : ojson(nullptr);
  j["steady_max_cwnd"] = m.steady_max_cwnd;
  j["steady_avg_cwnd"] = m.steady_avg_cwnd;
  j["steady_throughput_Bps"] = m.steady_throughput_Bps;

  j["conservation_ok"] = m.conservation_ok;
  j["events_dispatched"] = m.events_dispatched;

  ojson samples = ojson::array();
  for (const auto& e : m.epoch_samples) {
    ojson s;
    s["index"] = e.index;
    s["at_us"] = e.at.ticks();
    s["cwnd"] = e.cwnd;
    s["acked_segments"] = e.acked_segments;
    samples.push_back(s);
  }
  j["epoch_samples"] = samples;

  ojson rows = ojson::array();
  for (const auto& r : report.rows) {
    ojson row;
    row["name"] = r.name;
    row["simulated"] = r.simulated;
    row["predicted"] = r.predicted;
    row["relation"] = r.relation;
    row["verdict"] = std::string(to_string(r.verdict));
    row["note"] = r.note;
    rows.push_back(row);
  }
  j["report"] = rows;
  j["all_pass"] = report.all_pass();
  return j.dump(2) + "\n";
}

RunMetrics metrics_from_summary(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw ConfigError(std::string("summary is not valid JSON: ") + e.what());
  }
  RunMetrics m;
  try {
    auto us = [&](const char* k) { return SimTime{j.at(k).get<SimTime::rep>()}; };
    auto opt_us = [&](const char* k) -> std::optional<SimTime> {
      const auto& v = j.at(k);
      if (v.is_null()) {
        return std::nullopt;
      }
      return SimTime{v.get<SimTime::rep>()};
    };
    auto drops = [&](const char* k) {
      return ReplayDrops{j.at(k).at("left_of_window").get<std::uint64_t>(),
                         j.at(k).at("duplicate").get<std::uint64_t>()};
    };
    m.scenario = j.at("scenario").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.t_end = us("t_end_us");
    m.rtt = us("rtt_us");
    m.mss = j.at("mss").get<std::uint64_t>();
    m.data_transmissions = j.at("data_transmissions").get<std::uint64_t>();
    m.retransmissions = j.at("retransmissions").get<std::uint64_t>();
    m.segments_acked = j.at("segments_acked").get<std::uint64_t>();
    m.bytes_acked = j.at("bytes_acked").get<std::uint64_t>();
    m.in_flight_at_end = j.at("in_flight_at_end").get<std::uint64_t>();
    m.throughput_Bps = j.at("throughput_Bps").get<double>();
    m.fast_retransmits = j.at("fast_retransmits").get<std::uint64_t>();
    m.rtos = j.at("rtos").get<std::uint64_t>();
    m.dup_acks_at_sender = j.at("dup_acks_at_sender").get<std::uint64_t>();
    m.first_fast_retransmit_at = opt_us("first_fast_retransmit_us");
    m.first_rto_at = opt_us("first_rto_us");
    m.max_cwnd = j.at("max_cwnd").get<double>();
    m.avg_cwnd = j.at("avg_cwnd").get<double>();
    m.late_throughput_Bps = j.at("late_throughput_Bps").get<double>();
    m.legit_drops = drops("legit_replay_drops");
    m.injected_drops = drops("injected_replay_drops");
    m.scripted_drops = j.at("scripted_drops").get<std::uint64_t>();
    m.injections = j.at("injections").get<std::uint64_t>();
    m.injections_accepted = j.at("injections_accepted").get<std::uint64_t>();
    m.adversary_epochs = j.at("adversary_epochs").get<std::uint64_t>();
    m.adversary_epochs_skipped = j.at("adversary_epochs_skipped").get<std::uint64_t>();
    m.budget_rho = PacketRate{j.at("budget_rho_packets").get<std::uint64_t>(),
                              j.at("budget_rho_per_us").get<std::uint64_t>()};
    m.budget_sigma = j.at("budget_sigma").get<std::uint64_t>();
    m.budget_sound = j.at("budget_sound").get<bool>();
    m.budget_worst_excess = j.at("budget_worst_excess").get<double>();
    m.rttp_alerts = j.at("rttp_alerts").get<std::uint64_t>();
    m.rttp_collisions = j.at("rttp_collisions").get<std::uint64_t>();
    m.rttp_held = j.at("rttp_held").get<std::uint64_t>();
    m.rttp_released = j.at("rttp_released").get<std::uint64_t>();
    m.rttp_discarded = j.at("rttp_discarded").get<std::uint64_t>();
    m.rttp_overflows = j.at("rttp_overflows").get<std::uint64_t>();
    m.rttp_buffered_data = j.at("rttp_buffered_data").get<std::uint64_t>();
    m.rttp_typical_delay = us("rttp_typical_delay_us");
    if (!j.at("steady_epoch").is_null()) {
      m.steady_epoch = j.at("steady_epoch").get<std::uint64_t>();
    }
    m.steady_max_cwnd = j.at("steady_max_cwnd").get<double>();
    m.steady_avg_cwnd = j.at("steady_avg_cwnd").get<double>();
    m.steady_throughput_Bps = j.at("steady_throughput_Bps").get<double>();
    m.conservation_ok = j.at("conservation_ok").get<bool>();
    m.events_dispatched = j.at("events_dispatched").get<std::uint64_t>();
    for (const auto& s : j.at("epoch_samples")) {
      m.epoch_samples.push_back(EpochSample{s.at("index").get<std::uint64_t>(),
                                            SimTime{s.at("at_us").get<SimTime::rep>()},
                                            s.at("cwnd").get<double>(),
                                            s.at("acked_segments").get<std::uint64_t>()});
    }
  } catch (const ojson::exception& e) {
    throw ConfigError(std::string("summary is missing or mistyped a field: ") + e.what());
  }
  return m;
}

}  // namespace stealthsim
