#include "stealthsim/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "stealthsim/error.hpp"

namespace stealthsim {

namespace {

std::string render(const std::vector<Diagnostic>& diags) {
  std::ostringstream os;
  os << "scenario has " << diags.size() << " error(s)";
  for (const auto& d : diags) {
    os << "\n  ";
    if (d.line != 0) {
      os << "line " << d.line << ": ";
    }
    if (!d.key.empty()) {
      os << d.key << ": ";
    }
    os << d.message;
  }
  return os.str();
}

}  // namespace

ParseError::ParseError(std::vector<Diagnostic> diags)
    : std::runtime_error(render(diags)), diags_(std::move(diags)) {}

SimTime ScenarioConfig::data_tx_time() const {
  return SimTime{(mss * 1'000'000 + rate - 1) / rate};
}

SimTime ScenarioConfig::ack_tx_time() const {
  return SimTime{(ack_size * 1'000'000 + rate - 1) / rate};
}

SimTime ScenarioConfig::nominal_rtt() const {
  return one_way_delay * 2 + data_tx_time() + ack_tx_time();
}

SimTime ScenarioConfig::effective_rto() const {
  return tcp_rto.value_or(nominal_rtt() * 4);
}

SimTime ScenarioConfig::effective_tap_offset() const {
  return tap_offset.value_or(one_way_delay / 2);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  std::size_t line = 0;
};

/// Splits "12.5ms" into {12.5, "ms"}.
bool split_number(std::string_view text, double& number, std::string_view& unit) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, number);
  if (ec != std::errc{} || ptr == first) {
    return false;
  }
  unit = trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr)));
  return std::isfinite(number);
}

}  // namespace

std::optional<SimTime> parse_duration(std::string_view text, std::optional<SimTime> rtt, std::string* error) {
  auto fail = [&](std::string msg) -> std::optional<SimTime> {
    if (error != nullptr) {
      *error = std::move(msg);
    }
    return std::nullopt;
  };
  text = trim(text);
  double v = 0;
  std::string_view unit;
  if (!split_number(text, v, unit)) {
    return fail("expected a duration (e.g. 50ms), got '" + std::string(text) + "'");
  }
  if (v < 0) {
    return fail("duration must be >= 0");
  }
  double us = 0;
  if (unit == "us") {
    us = v;
  } else if (unit == "ms") {
    us = v * 1e3;
  } else if (unit == "s") {
    us = v * 1e6;
  } else if (unit == "rtt") {
    if (!rtt) {
      return fail("the rtt unit is not available here");
    }
    us = v * static_cast<double>(rtt->ticks());
  } else if (unit.empty()) {
    return fail("missing time unit (us, ms, s or rtt)");
  } else {
    return fail("unknown time unit '" + std::string(unit) + "'");
  }
  return SimTime{static_cast<SimTime::rep>(std::llround(us))};
}

std::optional<std::uint64_t> parse_rate(std::string_view text, std::string* error) {
  auto fail = [&](std::string msg) -> std::optional<std::uint64_t> {
    if (error != nullptr) {
      *error = std::move(msg);
    }
    return std::nullopt;
  };
  text = trim(text);
  double v = 0;
  std::string_view unit;
  if (!split_number(text, v, unit)) {
    return fail("expected a rate (e.g. 10MBps), got '" + std::string(text) + "'");
  }
  double scale = 0;
  if (unit.empty() || unit == "Bps") {
    scale = 1;
  } else if (unit == "KBps") {
    scale = 1e3;
  } else if (unit == "MBps") {
    scale = 1e6;
  } else if (unit == "GBps") {
    scale = 1e9;
  } else {
    return fail("unknown rate unit '" + std::string(unit) + "' (use Bps, KBps, MBps, GBps)");
  }
  const double bytes = std::round(v * scale);
  if (bytes < 1) {
    return fail("rate must be > 0");
  }
  return static_cast<std::uint64_t>(bytes);
}

namespace {

class Reader {
public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  std::vector<Diagnostic> diags;

  const Entry* find(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      return nullptr;
    }
    used_.insert(key);
    return &it->second;
  }

  void error(const std::string& key, const std::string& msg) {
    auto it = entries_.find(key);
    diags.push_back(Diagnostic{it == entries_.end() ? 0 : it->second.line, key, msg});
  }

  void report_unknown() {
    for (const auto& [key, e] : entries_) {
      if (!used_.contains(key)) {
        diags.push_back(Diagnostic{e.line, key, "unknown key"});
      }
    }
  }

  void text(const std::string& key, std::string& out) {
    if (const Entry* e = find(key)) {
      out = e->value;
    }
  }

  void u64(const std::string& key, std::uint64_t& out) {
    const Entry* e = find(key);
    if (e == nullptr) {
      return;
    }
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
    if (ec != std::errc{} || ptr != e->value.data() + e->value.size()) {
      error(key, "expected an integer, got '" + e->value + "'");
      return;
    }
    if (v < 0) {
      error(key, key + " must be >= 0");
      return;
    }
    out = static_cast<std::uint64_t>(v);
  }

  void real(const std::string& key, double& out) {
    const Entry* e = find(key);
    if (e == nullptr) {
      return;
    }
    double v = 0;
    std::string_view unit;
    if (!split_number(e->value, v, unit) || !unit.empty()) {
      error(key, "expected a number, got '" + e->value + "'");
      return;
    }
    out = v;
  }

  void flag(const std::string& key, bool& out) {
    const Entry* e = find(key);
    if (e == nullptr) {
      return;
    }
    const std::string& v = e->value;
    if (v == "on" || v == "true" || v == "yes" || v == "1") {
      out = true;
    } else if (v == "off" || v == "false" || v == "no" || v == "0") {
      out = false;
    } else {
      error(key, "expected on/off, got '" + v + "'");
    }
  }

  void size(const std::string& key, std::uint64_t& out) {
    const Entry* e = find(key);
    if (e == nullptr) {
      return;
    }
    double v = 0;
    std::string_view unit;
    if (!split_number(e->value, v, unit) || (unit != "" && unit != "B")) {
      error(key, "expected a size in bytes (e.g. 1000B), got '" + e->value + "'");
      return;
    }
    if (v < 1 || v != std::floor(v)) {
      error(key, key + " must be a positive whole number of bytes");
      return;
    }
    out = static_cast<std::uint64_t>(v);
  }

  void rate(const std::string& key, std::uint64_t& out) {
    const Entry* e = find(key);
    if (e == nullptr) {
      return;
    }
    std::string err;
    if (auto v = parse_rate(e->value, &err)) {
      out = *v;
    } else {
      error(key, err);
    }
  }

  /// `rtt` may be unset while the network keys are still being read.
  std::optional<SimTime> duration(const std::string& key, std::optional<SimTime> rtt) {
    const Entry* e = find(key);
    if (e == nullptr) {
      return std::nullopt;
    }
    std::string err;
    auto v = parse_duration(e->value, rtt, &err);
    if (!v) {
      error(key, err);
    }
    return v;
  }

  template <typename T, typename Parse>
  void choice(const std::string& key, T& out, Parse parse, std::string_view allowed) {
    const Entry* e = find(key);
    if (e == nullptr) {
      return;
    }
    if (auto v = parse(e->value)) {
      out = *v;
    } else {
      error(key, "unknown value '" + e->value + "' (expected one of " + std::string(allowed) + ")");
    }
  }

private:
  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
};

}  // namespace

ScenarioConfig parse_scenario(std::string_view text) {
  std::map<std::string, Entry> entries;
  std::vector<Diagnostic> early;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      early.push_back(Diagnostic{lineno, std::string(line), "expected key = value"});
      continue;
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) {
      early.push_back(Diagnostic{lineno, "", "empty key"});
      continue;
    }
    if (auto it = entries.find(key); it != entries.end()) {
      early.push_back(Diagnostic{lineno, key,
                                 "duplicate key (first set on line " + std::to_string(it->second.line) + ")"});
      continue;
    }
    entries.emplace(std::move(key), Entry{std::move(value), lineno});
  }

  std::map<std::string, std::size_t> lines;
  for (const auto& [key, e] : entries) {
    lines.emplace(key, e.line);
  }
  Reader r(std::move(entries));
  r.diags = std::move(early);
  ScenarioConfig cfg;

  r.text("name", cfg.name);
  if (auto d = r.duration("one_way_delay", std::nullopt)) {
    cfg.one_way_delay = *d;
  }
  r.rate("rate", cfg.rate);
  r.size("mss", cfg.mss);
  r.size("ack_size", cfg.ack_size);
  r.flag("link_serialization", cfg.link_serialization);
  const SimTime rtt = cfg.nominal_rtt();

  if (auto d = r.duration("t_end", rtt)) {
    cfg.t_end = *d;
  }
  r.u64("transfer_segments", cfg.transfer_segments);
  r.u64("anti_replay_window", cfg.anti_replay_window);
  r.choice("sa_policy", cfg.sa_policy,
           [](std::string_view s) -> std::optional<SaPolicy> {
             if (s == "single") return SaPolicy::single;
             if (s == "per_flow") return SaPolicy::per_flow;
             return std::nullopt;
           },
           "single, per_flow");

  r.u64("tcp_initial_cwnd", cfg.tcp_initial_cwnd);
  r.u64("tcp_initial_ssthresh", cfg.tcp_initial_ssthresh);
  cfg.tcp_rto = r.duration("tcp_rto", rtt);
  r.u64("tcp_max_cwnd", cfg.tcp_max_cwnd);
  std::uint64_t dupthresh = cfg.tcp_dupack_threshold;
  r.u64("tcp_dupack_threshold", dupthresh);
  cfg.tcp_dupack_threshold = static_cast<unsigned>(dupthresh);

  AdversaryConfig& adv = cfg.adversary;
  adv.known_window = cfg.anti_replay_window;
  r.choice("adversary", adv.strategy, parse_strategy,
           "none, ack_duplicator, data_duplicator, speedup_single, speedup_multi");
  if (adv.strategy == Strategy::ack_duplicator) {
    adv.direction = TapDirection::client_to_server;
  }
  r.choice("adversary_direction", adv.direction, parse_tap_direction,
           "client_to_server, server_to_client, both");
  r.choice("adversary_observability", adv.observability, parse_observability, "transparent, opaque");
  if (auto d = r.duration("adversary_speedup", rtt)) {
    adv.speedup = *d;
  }
  if (auto d = r.duration("attack_period", rtt)) {
    adv.epoch_period = *d;
  }
  if (auto d = r.duration("adversary_start", rtt)) {
    adv.start = *d;
  }
  r.u64("adversary_max_epochs", adv.max_epochs);
  std::uint64_t copies = adv.copies;
  r.u64("adversary_copies", copies);
  adv.copies = static_cast<unsigned>(copies);
  const bool sigma_given = r.find("adversary_sigma") != nullptr;
  r.u64("adversary_sigma", adv.sigma);
  if (!sigma_given) {
    adv.sigma = adv.strategy == Strategy::speedup_single ? 1 : adv.copies;
  }
  double rho = 0;
  r.real("adversary_rho", rho);
  if (rho < 0) {
    r.error("adversary_rho", "adversary_rho must be > 0");
  } else if (rho > 0) {
    try {
      adv.rho = PacketRate::per_second(rho);
    } catch (const ConfigError& e) {
      r.error("adversary_rho", e.what());
    }
  }
  r.u64("adversary_known_window", adv.known_window);
  cfg.tap_offset = r.duration("adversary_tap_offset", rtt);

  r.flag("rttp", cfg.rttp.enabled);
  r.choice("rttp_mode", cfg.rttp.mode, parse_rttp_mode, "hold_acks, buffer_data");
  r.real("rttp_guard", cfg.rttp.guard);
  std::uint64_t capacity = cfg.rttp.capacity;
  r.u64("rttp_capacity", capacity);
  cfg.rttp.capacity = static_cast<std::size_t>(capacity);
  if (const Entry* e = r.find("rttp_alpha")) {
    const auto slash = e->value.find('/');
    std::uint64_t num = 0;
    std::uint64_t den = 0;
    bool ok = slash != std::string::npos;
    if (ok) {
      const std::string a = e->value.substr(0, slash);
      const std::string b = e->value.substr(slash + 1);
      ok = std::from_chars(a.data(), a.data() + a.size(), num).ptr == a.data() + a.size() &&
           std::from_chars(b.data(), b.data() + b.size(), den).ptr == b.data() + b.size() && den != 0 &&
           num != 0 && num <= den;
    }
    if (ok) {
      cfg.rttp.alpha_num = num;
      cfg.rttp.alpha_den = den;
    } else {
      r.error("rttp_alpha", "expected a fraction num/den in (0, 1], got '" + e->value + "'");
    }
  }

  if (const Entry* e = r.find("drop_data_seq")) {
    std::string_view rest = e->value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = trim(rest.substr(0, comma));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      SeqNo v = 0;
      if (item.empty() || std::from_chars(item.data(), item.data() + item.size(), v).ptr != item.data() + item.size()) {
        r.error("drop_data_seq", "expected a comma separated list of sequence numbers");
        break;
      }
      cfg.drop_data_seq.push_back(v);
    }
  }
  r.u64("seed", cfg.seed);

  r.report_unknown();
  if (!r.diags.empty()) {
    throw ParseError(std::move(r.diags));
  }
  try {
    validate_scenario(cfg);
  } catch (const ParseError& e) {
    std::vector<Diagnostic> diags = e.diagnostics();
    for (auto& d : diags) {
      if (auto it = lines.find(d.key); it != lines.end()) {
        d.line = it->second;
      }
    }
    throw ParseError(std::move(diags));
  }
  return cfg;
}

void validate_scenario(const ScenarioConfig& cfg) {
  std::vector<Diagnostic> diags;
  auto fail = [&](std::string key, std::string msg) { diags.push_back(Diagnostic{0, std::move(key), std::move(msg)}); };

  if (cfg.one_way_delay.ticks() == 0) {
    fail("one_way_delay", "one_way_delay must be > 0");
  }
  if (cfg.rate == 0) {
    fail("rate", "rate must be > 0");
  }
  if (cfg.t_end.ticks() == 0) {
    fail("t_end", "t_end must be > 0");
  }
  if (cfg.tcp_initial_cwnd == 0) {
    fail("tcp_initial_cwnd", "tcp_initial_cwnd must be >= 1");
  }
  if (cfg.tcp_dupack_threshold == 0) {
    fail("tcp_dupack_threshold", "tcp_dupack_threshold must be >= 1");
  }
  if (cfg.tcp_rto && cfg.tcp_rto->ticks() == 0) {
    fail("tcp_rto", "tcp_rto must be > 0");
  }
  if (cfg.tap_offset && *cfg.tap_offset >= cfg.one_way_delay) {
    fail("adversary_tap_offset", "adversary_tap_offset must be < one_way_delay");
  }
  if (!(cfg.rttp.guard > 0.0) || cfg.rttp.guard > 1.0) {
    fail("rttp_guard", "rttp_guard must lie in (0, 1]");
  }
  if (cfg.rttp.capacity == 0) {
    fail("rttp_capacity", "rttp_capacity must be >= 1");
  }

  const AdversaryConfig& adv = cfg.adversary;
  if (adv.strategy != Strategy::none) {
    if (adv.epoch_period.ticks() == 0) {
      fail("attack_period", "attack_period must be > 0 when an adversary is configured");
    }
    if (adv.copies == 0) {
      fail("adversary_copies", "adversary_copies must be >= 1");
    }
    if (adv.sigma == 0) {
      fail("adversary_sigma", "adversary_sigma must be >= 1");
    }
  }
  const bool speedup = adv.strategy == Strategy::speedup_single || adv.strategy == Strategy::speedup_multi;
  if (speedup) {
    const SimTime reach = cfg.one_way_delay - cfg.effective_tap_offset();
    if (adv.speedup.ticks() == 0) {
      fail("adversary_speedup", "speedup strategies need adversary_speedup > 0");
    } else if (adv.speedup >= cfg.one_way_delay) {
      fail("adversary_speedup", "adversary_speedup must be < one_way_delay (the adversary path has non-zero delay)");
    } else if (adv.speedup >= reach) {
      fail("adversary_speedup",
           "adversary_speedup must be < one_way_delay - adversary_tap_offset so copies leave after being observed");
    }
  }
  if (!diags.empty()) {
    throw ParseError(std::move(diags));
  }
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open scenario file " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  ScenarioConfig cfg = parse_scenario(ss.str());
  if (cfg.name.empty()) {
    const auto slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    if (const auto dot = base.rfind('.'); dot != std::string::npos) {
      base = base.substr(0, dot);
    }
    cfg.name = base;
  }
  return cfg;
}

}  // namespace stealthsim
