#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stealthsim/analytics.hpp"
#include "stealthsim/compare.hpp"
#include "stealthsim/error.hpp"
#include "stealthsim/scenario.hpp"
#include "stealthsim/simulation.hpp"
#include "stealthsim/trace_output.hpp"

namespace fs = std::filesystem;
using namespace stealthsim;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

TraceLevel trace_level_from_env() {
  const char* v = std::getenv("STEALTHSIM_TRACE_LEVEL");
  if (v == nullptr || *v == '\0') {
    return TraceLevel::full;
  }
  if (auto l = parse_trace_level(v)) {
    return *l;
  }
  std::cerr << "warning: STEALTHSIM_TRACE_LEVEL=" << v << " is not off|summary|full, using full\n";
  return TraceLevel::full;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot write " + path);
  }
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_report(std::ostream& os, const std::string& title, const ComparisonReport& rep) {
  os << title << '\n';
  for (const auto& r : rep.rows) {
    os << "  " << std::left << std::setw(13) << ("[" + std::string(to_string(r.verdict)) + "]")
       << std::setw(26) << r.name << " sim=" << std::setw(12) << r.simulated << ' ' << std::setw(22)
       << r.relation << " model=" << std::setw(12) << r.predicted;
    if (!r.note.empty()) {
      os << "  " << r.note;
    }
    os << '\n';
  }
  os << "  overall: " << (rep.all_pass() ? "PASS" : "FAIL") << '\n';
}

struct Outcome {
  std::string name;
  ComparisonReport report;
  std::string error;
};

Outcome run_one(const std::string& scenario_path, const std::string& trace_path, const std::string& summary_path,
                TraceLevel level) {
  Outcome out;
  const ScenarioConfig cfg = load_scenario_file(scenario_path);
  out.name = cfg.name;
  RunOptions opts;
  opts.keep_trace = level == TraceLevel::full && !trace_path.empty();
  const RunMetrics m = run_scenario(cfg, opts);
  out.report = compare_run(cfg, m);
  if (level == TraceLevel::full && !trace_path.empty()) {
    write_file(trace_path, trace_csv(m));
  }
  if (level != TraceLevel::off && !summary_path.empty()) {
    write_file(summary_path, summary_json(m, out.report));
  }
  return out;
}

int cmd_run(const std::string& scenario, const std::string& trace, const std::string& summary) {
  const TraceLevel level = trace_level_from_env();
  if (level != TraceLevel::full && !trace.empty()) {
    std::cerr << "note: trace level " << to_string(level) << " suppresses --trace\n";
  }
  if (level == TraceLevel::off && !summary.empty()) {
    std::cerr << "note: trace level off suppresses --summary\n";
  }
  const Outcome o = run_one(scenario, trace, summary, level);
  print_report(std::cout, o.name, o.report);
  return o.report.all_pass() ? 0 : kExitFail;
}

std::optional<SimTime> duration_arg(const std::string& flag, const std::string& text, std::optional<SimTime> rtt) {
  if (text.empty()) {
    return std::nullopt;
  }
  std::string err;
  auto v = parse_duration(text, rtt, &err);
  if (!v) {
    throw ConfigError(flag + ": " + err);
  }
  return v;
}

struct PredictArgs {
  std::string T;
  std::string rtt;
  std::string dprop;
  std::string R;
  double cwnd0 = 0;
  std::uint64_t W = 0;
  std::uint64_t L = 0;
  std::uint64_t mss = 1000;
  bool stated = false;
};

int cmd_predict(const PredictArgs& a) {
  using nlohmann::ordered_json;
  ordered_json j;
  const SimTime rtt = *duration_arg("--rtt", a.rtt, std::nullopt);
  const SimTime T = *duration_arg("--T", a.T, rtt);
  const auto variant = a.stated ? analytics::Variant::stated : analytics::Variant::derived;
  j["T_us"] = T.ticks();
  j["rtt_us"] = rtt.ticks();
  j["steady_state_cwnd_max_mss"] = analytics::steady_state_cwnd_max(T, rtt);
  j["steady_state_cwnd_avg_mss"] = analytics::steady_state_cwnd_avg(T, rtt);
  j["steady_state_throughput_Bps"] = analytics::steady_state_throughput(T, rtt, a.mss, variant);
  j["throughput_variant"] = a.stated ? "stated" : "derived";
  if (a.cwnd0 > 0) {
    try {
      j["epochs_to_steady_state"] = analytics::epochs_to_steady_state(a.cwnd0, T, rtt);
    } catch (const DomainError& e) {
      j["epochs_to_steady_state"] = std::string("untestable: ") + e.what();
    }
    if (a.W > 0) {
      j["rto_feasible"] = analytics::rto_feasible(a.cwnd0, a.W);
    }
  }
  if (!a.R.empty() || !a.dprop.empty() || a.L != 0) {
    if (a.R.empty() || a.dprop.empty() || a.L == 0) {
      throw ConfigError("required_window_size needs --R, --dprop and --L together");
    }
    std::string err;
    const auto R = parse_rate(a.R, &err);
    if (!R) {
      throw ConfigError("--R: " + err);
    }
    const SimTime d = *duration_arg("--dprop", a.dprop, rtt);
    j["required_window_size"] = analytics::required_window_size(static_cast<double>(*R), d, a.L);
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_compare(const std::string& summary, const std::string& scenario) {
  const ScenarioConfig cfg = load_scenario_file(scenario);
  const RunMetrics m = metrics_from_summary(read_file(summary));
  const ComparisonReport rep = compare_run(cfg, m);
  print_report(std::cout, m.scenario, rep);
  return rep.all_pass() ? 0 : kExitFail;
}

int cmd_suite(const std::string& dir, const std::string& out_dir, unsigned jobs) {
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".scn") {
      files.push_back(e.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "no .scn files in " << dir << '\n';
    return kExitError;
  }
  const TraceLevel level = trace_level_from_env();
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
  }
  if (jobs == 0) {
    jobs = std::max(1U, std::thread::hardware_concurrency());
  }

  std::vector<Outcome> outcomes(files.size());
  std::size_t next = 0;
  while (next < files.size()) {
    std::vector<std::pair<std::size_t, std::future<Outcome>>> batch;
    for (unsigned k = 0; k < jobs && next < files.size(); ++k, ++next) {
      const std::string path = files[next];
      const std::string stem = fs::path(path).stem().string();
      const std::string trace = out_dir.empty() ? "" : (fs::path(out_dir) / (stem + ".csv")).string();
      const std::string summary = out_dir.empty() ? "" : (fs::path(out_dir) / (stem + ".json")).string();
      batch.emplace_back(next, std::async(std::launch::async, [path, trace, summary, level] {
                           try {
                             return run_one(path, trace, summary, level);
                           } catch (const std::exception& e) {
                             Outcome o;
                             o.name = fs::path(path).stem().string();
                             o.error = e.what();
                             return o;
                           }
                         }));
    }
    for (auto& [idx, fut] : batch) {
      outcomes[idx] = fut.get();
    }
  }

  bool all = true;
  std::cout << std::left << std::setw(36) << "scenario" << std::setw(8) << "result"
            << "rows (pass/fail/untestable/info)\n";
  for (const auto& o : outcomes) {
    int counts[4] = {0, 0, 0, 0};
    for (const auto& r : o.report.rows) {
      ++counts[static_cast<int>(r.verdict)];
    }
    const bool ok = o.error.empty() && o.report.all_pass();
    all = all && ok;
    std::cout << std::setw(36) << o.name << std::setw(8) << (ok ? "PASS" : "FAIL");
    if (!o.error.empty()) {
      std::cout << "error: " << o.error;
    } else {
      std::cout << counts[0] << '/' << counts[1] << '/' << counts[2] << '/' << counts[3];
      for (const auto& r : o.report.rows) {
        if (r.verdict == Verdict::fail) {
          std::cout << "  failed " << r.name << " (sim " << r.simulated << " " << r.relation << " model "
                    << r.predicted << ")";
        }
      }
    }
    std::cout << '\n';
  }
  return all ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic simulator of stealth MITM attacks on TCP over an IPsec tunnel"};
  app.require_subcommand(1);

  std::string scenario;
  std::string trace;
  std::string summary;
  auto* run = app.add_subcommand("run", "Run one scenario and compare it with the closed-form model");
  run->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--trace", trace, "Write the per-ACK cwnd trace as csv");
  run->add_option("--summary", summary, "Write the json summary");

  PredictArgs pa;
  auto* predict = app.add_subcommand("predict", "Evaluate the closed-form predictions");
  predict->add_option("--T", pa.T, "Attack period, e.g. 100ms or 2rtt")->required();
  predict->add_option("--rtt", pa.rtt, "Round-trip time, e.g. 100ms")->required();
  predict->add_option("--cwnd0", pa.cwnd0, "Pre-attack congestion window (MSS)");
  predict->add_option("--W", pa.W, "Anti-replay window width (packets)");
  predict->add_option("--R", pa.R, "Link rate, e.g. 10MBps");
  predict->add_option("--dprop", pa.dprop, "Propagation delay, e.g. 1s");
  predict->add_option("--L", pa.L, "Maximum packet size (bytes)");
  predict->add_option("--mss", pa.mss, "Segment size (bytes)");
  predict->add_flag("--stated", pa.stated, "Use the alternate 2T/rtt^2 throughput form");

  std::string summary_in;
  std::string scenario_in;
  auto* compare = app.add_subcommand("compare", "Compare a saved json summary with the model");
  compare->add_option("summary", summary_in, "Summary json written by run")->required()->check(CLI::ExistingFile);
  compare->add_option("scenario", scenario_in, "Scenario the summary came from")->required()->check(CLI::ExistingFile);

  std::string suite_dir;
  std::string out_dir;
  unsigned jobs = 0;
  auto* suite = app.add_subcommand("suite", "Run every .scn file in a directory");
  suite->add_option("dir", suite_dir, "Scenario directory")->required()->check(CLI::ExistingDirectory);
  suite->add_option("--out", out_dir, "Write <name>.csv and <name>.json here");
  suite->add_option("-j,--jobs", jobs, "Parallel runs (default: hardware threads)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      return cmd_run(scenario, trace, summary);
    }
    if (*predict) {
      return cmd_predict(pa);
    }
    if (*compare) {
      return cmd_compare(summary_in, scenario_in);
    }
    if (*suite) {
      return cmd_suite(suite_dir, out_dir, jobs);
    }
  } catch (const ParseError& e) {
    std::cerr << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
