#include "stealthsim/simulation.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <unordered_set>

#include "stealthsim/analytics.hpp"
#include "stealthsim/error.hpp"
#include "stealthsim/event_queue.hpp"
#include "stealthsim/link.hpp"
#include "stealthsim/rttp.hpp"
#include "stealthsim/tcp_receiver.hpp"
#include "stealthsim/tcp_sender.hpp"

namespace stealthsim {

std::optional<std::uint64_t> detect_steady_state(std::span<const EpochSample> samples, std::size_t span) {
  if (span == 0) {
    span = 1;
  }
  for (std::size_t i = 0; i + span < samples.size(); ++i) {
    bool holds = true;
    for (std::size_t k = i; k < i + span; ++k) {
      if (!analytics::steady_state_condition(samples[k].cwnd, samples[k + 1].cwnd)) {
        holds = false;
        break;
      }
    }
    if (holds) {
      return samples[i].index;
    }
  }
  return std::nullopt;
}

namespace {

constexpr EndpointId kServer = 0;
constexpr EndpointId kServerGw = 1;
constexpr EndpointId kClientGw = 2;
constexpr SaId kServerGwSaBase = 100;
constexpr SaId kClientGwSaBase = 200;

std::size_t dir_index(LinkDirection d) {
  return d == LinkDirection::to_client ? 0 : 1;
}

struct PathCounters {
  std::uint64_t sent = 0;
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  std::uint64_t in_transit = 0;
};

TcpConfig tcp_config(const ScenarioConfig& cfg) {
  TcpConfig t;
  t.flow_id = 0;
  t.initial_cwnd = cfg.tcp_initial_cwnd;
  t.initial_ssthresh = cfg.tcp_initial_ssthresh;
  t.rto_interval = cfg.effective_rto();
  t.max_cwnd = cfg.tcp_max_cwnd;
  t.transfer_segments = cfg.transfer_segments;
  t.dupack_threshold = cfg.tcp_dupack_threshold;
  return t;
}

class Run {
public:
  Run(const ScenarioConfig& cfg, const RunOptions& opts)
      : cfg_(cfg),
        opts_(opts),
        to_client_(kServerGw, kClientGw, cfg.one_way_delay, cfg.rate, cfg.link_serialization),
        to_server_(kClientGw, kServerGw, cfg.one_way_delay, cfg.rate, cfg.link_serialization),
        sender_(tcp_config(cfg)),
        receiver_(0, 0),
        out_server_gw_(cfg.sa_policy, kServerGwSaBase),
        out_client_gw_(cfg.sa_policy, kClientGwSaBase),
        in_client_gw_(cfg.anti_replay_window),
        in_server_gw_(cfg.anti_replay_window),
        drops_(cfg.drop_data_seq.begin(), cfg.drop_data_seq.end()) {
    validate_scenario(cfg_);
    if (cfg_.adversary.strategy != Strategy::none) {
      adversary_.emplace(cfg_.adversary);
    }
    if (cfg_.rttp.enabled) {
      rttp_.emplace(cfg_.rttp);
    }
  }

  RunMetrics execute() {
    m_.scenario = cfg_.name;
    m_.seed = cfg_.seed;
    m_.t_end = cfg_.t_end;
    m_.rtt = cfg_.nominal_rtt();
    m_.mss = cfg_.mss;

    queue_.schedule(SimTime{}, kServer, [this] {
      record("start");
      apply(sender_.try_send(queue_.now()), "send");
    });
    m_.events_dispatched = queue_.run_until(cfg_.t_end);
    finish();
    return std::move(m_);
  }

private:
  SimTime now() const { return queue_.now(); }

  // ---- server side ----

  void apply(const SenderActions& a, std::string_view event) {
    if (a.fast_retransmit) {
      ++m_.fast_retransmits;
      if (!m_.first_fast_retransmit_at) {
        m_.first_fast_retransmit_at = now();
      }
    }
    if (a.timeout) {
      ++m_.rtos;
      if (!m_.first_rto_at) {
        m_.first_rto_at = now();
      }
    }
    if (a.duplicate_ack) {
      ++m_.dup_acks_at_sender;
    }
    switch (a.timer) {
      case TimerAction::keep: break;
      case TimerAction::stop: cancel_rto(); break;
      case TimerAction::restart:
        cancel_rto();
        rto_ = queue_.schedule(now() + sender_.state().current_rto(), kServer, [this] { on_rto(); });
        break;
    }
    for (const Segment& seg : a.transmit) {
      send_data(seg);
    }
    if (event != "send") {
      record(event);
    }
  }

  void cancel_rto() {
    if (rto_) {
      queue_.cancel(*rto_);
      rto_.reset();
    }
  }

  void on_rto() {
    rto_.reset();
    apply(sender_.on_rto(now()), "timeout");
  }

  void on_ack_at_server(const Segment& ack) {
    const SenderActions a = sender_.on_ack(ack, now());
    std::string_view ev = "stale_ack";
    if (a.fast_retransmit) {
      ev = "fast_retransmit";
    } else if (a.duplicate_ack) {
      ev = "dup_ack";
    } else if (a.new_data_acked) {
      ev = "new_ack";
    }
    apply(a, ev);
  }

  void send_data(const Segment& seg) {
    ++m_.data_transmissions;
    bool first_copy = false;
    if (seg.seq < sent_high_) {
      ++m_.retransmissions;
    } else {
      sent_high_ = seg.seq + 1;
      first_copy = true;
    }
    const bool lose = first_copy && drops_.contains(seg.seq);
    tunnel_send(LinkDirection::to_client, seg, lose);
  }

  // ---- tunnel ----

  void tunnel_send(LinkDirection dir, const Segment& seg, bool lose = false) {
    const bool down = dir == LinkDirection::to_client;
    const std::size_t size = seg.is_data() ? cfg_.mss : cfg_.ack_size;
    OutboundSaTable& out = down ? out_server_gw_ : out_client_gw_;
    Link& link = down ? to_client_ : to_server_;
    EspPacketRef pkt = out.encapsulate(seg, now(), size);
    const Link::Timing timing = link.transmit(size, now());
    if (lose) {
      ++m_.scripted_drops;
      return;
    }
    PathCounters& pc = paths_[dir_index(dir)];
    ++pc.sent;
    ++pc.in_transit;
    const EndpointId far = down ? kClientGw : kServerGw;
    queue_.schedule(timing.arrival, far, [this, dir, pkt] { on_tunnel_arrival(dir, pkt, std::nullopt); });
    if (adversary_ && adversary_->taps(dir)) {
      const SimTime seen = timing.departed + cfg_.effective_tap_offset();
      const SimTime arrival = timing.arrival;
      queue_.schedule(seen, far, [this, dir, pkt, arrival] { on_observe(Observation{pkt, now(), arrival, dir}); });
    }
  }

  void on_observe(const Observation& obs) {
    observed_.insert(obs.packet.get());
    adversary_->observe(obs);
    if (flush_at_ != now()) {
      flush_at_ = now();
      queue_.schedule(now(), kServerGw, [this] { on_flush(); });
    }
  }

  void on_flush() {
    std::vector<Injection> inj = adversary_->decide(now());
    if (inj.empty()) {
      return;
    }
    const std::uint64_t index = next_epoch_index_++;
    queue_.schedule(inj.front().deliver_at, kServer, [this, index] {
      m_.epoch_samples.push_back(
          EpochSample{index, now(), sender_.state().cwnd.to_double(), sender_.state().highest_acked});
    });
    for (const Injection& i : inj) {
      const Segment& s = i.packet->inner();
      InjectionRecord rec;
      rec.injected_at = i.injected_at;
      rec.deliver_at = i.deliver_at;
      rec.esp_seq = i.packet->esp_seq();
      rec.sa_id = i.packet->sa_id();
      rec.kind = s.kind;
      rec.inner = s.is_data() ? s.seq : s.ack_num;
      rec.toward = i.toward;
      rec.matches_observed = observed_.contains(i.packet.get());
      const std::size_t idx = m_.injection_log.size();
      m_.injection_log.push_back(rec);
      const EndpointId far = i.toward == LinkDirection::to_client ? kClientGw : kServerGw;
      const LinkDirection dir = i.toward;
      EspPacketRef pkt = i.packet;
      queue_.schedule(i.deliver_at, far, [this, dir, pkt, idx] { on_tunnel_arrival(dir, pkt, idx); });
    }
  }

  void on_tunnel_arrival(LinkDirection dir, const EspPacketRef& pkt, std::optional<std::size_t> injection) {
    const bool down = dir == LinkDirection::to_client;
    InboundSaTable& in = down ? in_client_gw_ : in_server_gw_;
    PathCounters& pc = paths_[dir_index(dir)];
    const ReplayVerdict v = in.check(*pkt);
    if (!injection) {
      --pc.in_transit;
    }
    if (v != ReplayVerdict::accept) {
      ReplayDrops& d = injection ? m_.injected_drops : m_.legit_drops;
      if (v == ReplayVerdict::reject_left_of_window) {
        ++d.left_of_window;
      } else {
        ++d.duplicate;
      }
      if (injection) {
        m_.injection_log[*injection].fate =
            v == ReplayVerdict::reject_left_of_window ? InjectionFate::left_of_window : InjectionFate::duplicate;
      } else {
        ++pc.rejected;
      }
      return;
    }
    if (injection) {
      m_.injection_log[*injection].fate = InjectionFate::accepted;
      ++m_.injections_accepted;
    } else {
      ++pc.accepted;
    }

    if (!down) {
      on_ack_at_server(pkt->inner());
      return;
    }
    if (!rttp_) {
      deliver_to_client(pkt->inner());
      return;
    }
    IncomingResult res = rttp_->on_incoming(*pkt, now(), tracker_.expected());
    sync_rttp_timer(res.arm_timer, res.cancel_timer);
    for (const Segment& s : res.forward) {
      deliver_to_client(s);
    }
  }

  // ---- client side ----

  void deliver_to_client(const Segment& seg) {
    tracker_.forwarded(seg.seq);
    client_ack_out(receiver_.on_segment(seg, now()));
  }

  void client_ack_out(const Segment& ack) {
    if (!rttp_) {
      tunnel_send(LinkDirection::to_server, ack);
      return;
    }
    OutgoingResult res = rttp_->on_outgoing_ack(ack, now());
    sync_rttp_timer(res.arm_timer, res.cancel_timer);
    for (const Segment& a : res.forward) {
      tunnel_send(LinkDirection::to_server, a);
    }
  }

  void sync_rttp_timer(std::optional<SimTime> arm, bool cancel) {
    if (cancel && rttp_timer_) {
      queue_.cancel(*rttp_timer_);
      rttp_timer_.reset();
    }
    if (arm) {
      if (rttp_timer_) {
        queue_.cancel(*rttp_timer_);
      }
      rttp_timer_ = queue_.schedule(std::max(*arm, now()), kClientGw, [this] { on_rttp_timer(); });
    }
  }

  void on_rttp_timer() {
    rttp_timer_.reset();
    for (const Segment& s : rttp_->on_timer(now())) {
      if (s.is_ack()) {
        tunnel_send(LinkDirection::to_server, s);
      } else {
        deliver_to_client(s);
      }
    }
  }

  // ---- bookkeeping ----

  void record(std::string_view event) {
    const TcpSenderState& st = sender_.state();
    const std::uint64_t effective = st.phase == Phase::fast_recovery ? st.ssthresh.raw() : st.cwnd.raw();
    m_.trace.push_back(TraceSample{now(), st.cwnd.raw(), effective, st.phase, std::string(event)});
    if (!half_mark_ && now() >= cfg_.t_end / 2) {
      half_mark_ = st.highest_acked;
    }
  }

  /// Time-weighted mean cwnd over [from, t_end].
  double mean_cwnd(SimTime from) const {
    const auto& tr = m_.trace;
    if (tr.empty() || cfg_.t_end <= from) {
      return 0.0;
    }
    long double area = 0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
      const SimTime a = std::max(tr[k].time, from);
      const SimTime b = k + 1 < tr.size() ? std::min(tr[k + 1].time, cfg_.t_end) : cfg_.t_end;
      if (b > a) {
        area += static_cast<long double>(tr[k].effective_raw) * static_cast<long double>((b - a).ticks());
      }
    }
    const long double span = static_cast<long double>((cfg_.t_end - from).ticks());
    return static_cast<double>(area / span / static_cast<long double>(Window::one));
  }

  void finish() {
    const TcpSenderState& st = sender_.state();
    m_.segments_acked = st.highest_acked;
    m_.bytes_acked = st.highest_acked * cfg_.mss;
    m_.in_flight_at_end = st.pending();
    m_.throughput_Bps = static_cast<double>(m_.bytes_acked) / cfg_.t_end.seconds();
    const SimTime half = cfg_.t_end / 2;
    const std::uint64_t acked_at_half = half_mark_.value_or(st.highest_acked);
    m_.late_throughput_Bps =
        static_cast<double>((st.highest_acked - acked_at_half) * cfg_.mss) / (cfg_.t_end - half).seconds();

    for (const auto& s : m_.trace) {
      m_.max_cwnd = std::max(m_.max_cwnd, Window::from_raw(s.cwnd_raw).to_double());
    }
    m_.avg_cwnd = mean_cwnd(SimTime{});

    if (adversary_) {
      const AdversaryStats& as = adversary_->stats();
      m_.injections = as.injected;
      m_.adversary_epochs = as.epochs;
      m_.adversary_epochs_skipped = as.epochs_skipped;
      m_.budget_rho = adversary_->budget().rho();
      m_.budget_sigma = adversary_->budget().sigma();
      std::vector<SimTime> times;
      times.reserve(m_.injection_log.size());
      for (const auto& r : m_.injection_log) {
        times.push_back(r.injected_at);
      }
      const BudgetAudit audit = audit_budget(times, m_.budget_rho, m_.budget_sigma);
      m_.budget_sound = audit.sound;
      m_.budget_worst_excess = audit.worst_excess;
    }
    if (rttp_) {
      const RttpStats& rs = rttp_->stats();
      m_.rttp_alerts = rs.alerts;
      m_.rttp_collisions = rs.collisions;
      m_.rttp_held = rs.held;
      m_.rttp_released = rs.released;
      m_.rttp_discarded = rs.discarded;
      m_.rttp_overflows = rs.overflows;
      m_.rttp_buffered_data = rs.buffered_data;
      m_.rttp_typical_delay = rttp_->state().typical.srtt();
    }

    m_.steady_epoch = detect_steady_state(m_.epoch_samples);
    if (m_.steady_epoch) {
      auto it = std::find_if(m_.epoch_samples.begin(), m_.epoch_samples.end(),
                             [&](const EpochSample& e) { return e.index == *m_.steady_epoch; });
      for (auto j = it; j != m_.epoch_samples.end(); ++j) {
        m_.steady_max_cwnd = std::max(m_.steady_max_cwnd, j->cwnd);
      }
      m_.steady_avg_cwnd = mean_cwnd(it->at);
      const double secs = (cfg_.t_end - it->at).seconds();
      if (secs > 0) {
        m_.steady_throughput_Bps =
            static_cast<double>((st.highest_acked - it->acked_segments) * cfg_.mss) / secs;
      }
    }

    bool ok = m_.bytes_acked <= m_.data_transmissions * cfg_.mss;
    ok = ok && st.next_seq == st.highest_acked + st.pending();
    const PathCounters& down = paths_[0];
    ok = ok && m_.data_transmissions == down.sent + m_.scripted_drops;
    for (const PathCounters& pc : paths_) {
      ok = ok && pc.sent == pc.accepted + pc.rejected + pc.in_transit;
    }
    std::uint64_t fates = 0;
    for (const auto& r : m_.injection_log) {
      fates += r.fate == InjectionFate::in_transit ? 0 : 1;
      ok = ok && r.matches_observed;
    }
    const std::uint64_t injected_rejected = m_.injected_drops.total();
    ok = ok && fates == m_.injections_accepted + injected_rejected;
    ok = ok && m_.injection_log.size() == m_.injections;
    m_.conservation_ok = ok;

    if (!opts_.keep_trace) {
      m_.trace.clear();
      m_.trace.shrink_to_fit();
    }
  }

  const ScenarioConfig& cfg_;
  RunOptions opts_;
  EventQueue queue_;
  Link to_client_;
  Link to_server_;
  TcpSender sender_;
  TcpReceiver receiver_;
  OutboundSaTable out_server_gw_;
  OutboundSaTable out_client_gw_;
  InboundSaTable in_client_gw_;
  InboundSaTable in_server_gw_;
  std::optional<Adversary> adversary_;
  std::optional<RttpGateway> rttp_;
  InnerSeqTracker tracker_;
  std::set<SeqNo> drops_;
  std::optional<EventHandle> rto_;
  std::optional<EventHandle> rttp_timer_;
  std::optional<SimTime> flush_at_;
  std::unordered_set<const EspPacket*> observed_;
  std::array<PathCounters, 2> paths_{};
  SeqNo sent_high_ = 0;
  /// highest_acked as of the first trace sample at or after t_end / 2.
  std::optional<SeqNo> half_mark_;
  std::uint64_t next_epoch_index_ = 0;
  RunMetrics m_;
};

}  // namespace

RunMetrics run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) {
  Run run(cfg, opts);
  return run.execute();
}

}  // namespace stealthsim
