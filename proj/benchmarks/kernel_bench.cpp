#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>

#include "stealthsim/adversary.hpp"
#include "stealthsim/anti_replay.hpp"
#include "stealthsim/budget.hpp"
#include "stealthsim/event_queue.hpp"
#include "stealthsim/scenario.hpp"
#include "stealthsim/simulation.hpp"

using namespace stealthsim;

namespace {

void BM_EventQueueScheduleRun(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  std::mt19937_64 rng(7);
  for (auto _ : state) {
    EventQueue q;
    std::uint64_t fired = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      q.schedule(SimTime{rng() % 1'000'000}, 0, [&fired] { ++fired; });
    }
    q.run_until(SimTime::from_s(1));
    benchmark::DoNotOptimize(fired);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_EventQueueScheduleRun)->Arg(1 << 10)->Arg(1 << 16);

void BM_AntiReplayInOrder(benchmark::State& state) {
  AntiReplayWindow w(static_cast<std::uint64_t>(state.range(0)));
  EspSeq seq = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(w.check(seq++));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AntiReplayInOrder)->Arg(64)->Arg(10000);

void BM_AntiReplayJittered(benchmark::State& state) {
  const auto width = static_cast<std::uint64_t>(state.range(0));
  AntiReplayWindow w(width);
  std::mt19937_64 rng(11);
  EspSeq right = width;
  for (auto _ : state) {
    right += rng() % 3;
    benchmark::DoNotOptimize(w.check(right - rng() % width));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AntiReplayJittered)->Arg(64)->Arg(10000);

void BM_BudgetAdmit(benchmark::State& state) {
  AdversaryBudget b(PacketRate::every(3, SimTime::from_ms(100)), 3);
  SimTime now{};
  for (auto _ : state) {
    now += SimTime::from_ms(33);
    benchmark::DoNotOptimize(b.admit(now, 1));
  }
}
BENCHMARK(BM_BudgetAdmit);

ScenarioConfig attacked(Strategy s, std::uint64_t window) {
  ScenarioConfig cfg;
  cfg.name = "bench";
  cfg.anti_replay_window = window;
  cfg.tcp_initial_cwnd = 64;
  cfg.tcp_initial_ssthresh = 64;
  cfg.t_end = SimTime::from_s(60);
  cfg.adversary.strategy = s;
  cfg.adversary.direction =
      s == Strategy::ack_duplicator ? TapDirection::client_to_server : TapDirection::server_to_client;
  cfg.adversary.epoch_period = cfg.nominal_rtt();
  cfg.adversary.speedup = SimTime::from_ms(10);
  return cfg;
}

void BM_ScenarioUnattacked(benchmark::State& state) {
  ScenarioConfig cfg = attacked(Strategy::none, 10000);
  RunOptions opts;
  opts.keep_trace = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_scenario(cfg, opts));
  }
}
BENCHMARK(BM_ScenarioUnattacked)->Unit(benchmark::kMillisecond);

void BM_ScenarioAckDuplication(benchmark::State& state) {
  ScenarioConfig cfg = attacked(Strategy::ack_duplicator, 0);
  RunOptions opts;
  opts.keep_trace = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_scenario(cfg, opts));
  }
}
BENCHMARK(BM_ScenarioAckDuplication)->Unit(benchmark::kMillisecond);

void BM_ScenarioReordering(benchmark::State& state) {
  ScenarioConfig cfg = attacked(Strategy::speedup_multi, 1'000'000);
  RunOptions opts;
  opts.keep_trace = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_scenario(cfg, opts));
  }
}
BENCHMARK(BM_ScenarioReordering)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
