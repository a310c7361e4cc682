#include "stealthsim/adversary.hpp"

#include <algorithm>

#include "stealthsim/error.hpp"

namespace stealthsim {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::none: return "none";
    case Strategy::ack_duplicator: return "ack_duplicator";
    case Strategy::data_duplicator: return "data_duplicator";
    case Strategy::speedup_single: return "speedup_single";
    case Strategy::speedup_multi: return "speedup_multi";
  }
  return "?";
}

std::string_view to_string(TapDirection d) {
  switch (d) {
    case TapDirection::client_to_server: return "client_to_server";
    case TapDirection::server_to_client: return "server_to_client";
    case TapDirection::both: return "both";
  }
  return "?";
}

std::string_view to_string(Observability o) {
  return o == Observability::transparent ? "transparent" : "opaque";
}

std::optional<Strategy> parse_strategy(std::string_view s) {
  for (auto v : {Strategy::none, Strategy::ack_duplicator, Strategy::data_duplicator,
                 Strategy::speedup_single, Strategy::speedup_multi}) {
    if (to_string(v) == s) {
      return v;
    }
  }
  return std::nullopt;
}

std::optional<TapDirection> parse_tap_direction(std::string_view s) {
  for (auto v : {TapDirection::client_to_server, TapDirection::server_to_client, TapDirection::both}) {
    if (to_string(v) == s) {
      return v;
    }
  }
  return std::nullopt;
}

std::optional<Observability> parse_observability(std::string_view s) {
  if (s == "transparent") {
    return Observability::transparent;
  }
  if (s == "opaque" || s == "opaque_esp") {
    return Observability::opaque;
  }
  return std::nullopt;
}

namespace {

std::uint64_t per_epoch(const AdversaryConfig& cfg) {
  return cfg.strategy == Strategy::speedup_single ? 1 : cfg.copies;
}

AdversaryBudget make_budget(const AdversaryConfig& cfg) {
  if (cfg.strategy == Strategy::none) {
    return AdversaryBudget{PacketRate{0, 1}, 0};
  }
  if (cfg.epoch_period.ticks() == 0) {
    throw ConfigError("adversary epoch period must be > 0");
  }
  if (cfg.copies == 0) {
    throw ConfigError("adversary copies must be >= 1");
  }
  const PacketRate rho =
      cfg.rho.packets == 0 ? PacketRate::every(per_epoch(cfg), cfg.epoch_period) : cfg.rho;
  return AdversaryBudget{rho, cfg.sigma};
}

}  // namespace

Adversary::Adversary(const AdversaryConfig& cfg)
    : cfg_(cfg), budget_(make_budget(cfg)), next_due_(cfg.start) {
  const bool speedup = cfg_.strategy == Strategy::speedup_single || cfg_.strategy == Strategy::speedup_multi;
  if (speedup && cfg_.speedup.ticks() == 0) {
    throw ConfigError("speedup strategies need speedup > 0");
  }
}

bool Adversary::taps(LinkDirection link) const {
  switch (cfg_.direction) {
    case TapDirection::both: return true;
    case TapDirection::client_to_server: return link == LinkDirection::to_server;
    case TapDirection::server_to_client: return link == LinkDirection::to_client;
  }
  return false;
}

bool Adversary::looks_like_ack(const Observation& o) const {
  if (cfg_.observability == Observability::transparent) {
    return o.packet->inner().is_ack();
  }
  return o.link == LinkDirection::to_server && o.packet->wire_size() <= cfg_.ack_size_threshold;
}

bool Adversary::looks_like_data(const Observation& o) const {
  if (cfg_.observability == Observability::transparent) {
    return o.packet->inner().is_data();
  }
  return o.packet->wire_size() > cfg_.ack_size_threshold;
}

void Adversary::observe(const Observation& obs) {
  if (!taps(obs.link)) {
    return;
  }
  ++stats_.observed;
  instant_.push_back(obs);
  in_flight_.push_back(obs);
}

void Adversary::prune(SimTime now) {
  std::erase_if(in_flight_, [now](const Observation& o) { return o.honest_arrival <= now; });
}

std::vector<Injection> Adversary::duplicate_latest(SimTime now, bool want_ack) const {
  for (auto it = instant_.rbegin(); it != instant_.rend(); ++it) {
    if (want_ack ? looks_like_ack(*it) : looks_like_data(*it)) {
      std::vector<Injection> out;
      for (unsigned c = 0; c < cfg_.copies; ++c) {
        out.push_back(Injection{it->packet, now, it->honest_arrival, it->link});
      }
      return out;
    }
  }
  return {};
}

std::vector<const Observation*> Adversary::travelling_data(SimTime now) const {
  std::vector<const Observation*> out;
  for (const auto& o : in_flight_) {
    if (o.honest_arrival > now && looks_like_data(o)) {
      out.push_back(&o);
    }
  }
  return out;
}

std::vector<Injection> Adversary::speedup_single(SimTime now) const {
  const std::uint64_t w = cfg_.known_window;
  if (w == 0) {
    return {};
  }
  const auto data = travelling_data(now);
  for (const Observation* j : data) {
    const EspSeq esp_j = j->packet->esp_seq();
    if (esp_j <= w || j->honest_arrival < now + cfg_.speedup) {
      continue;
    }
    const SimTime fast = j->honest_arrival - cfg_.speedup;
    const EspSeq victim = esp_j - w;
    const bool overtakes = std::any_of(data.begin(), data.end(), [&](const Observation* v) {
      return v->packet->sa_id() == j->packet->sa_id() && v->packet->esp_seq() == victim &&
             v->honest_arrival > fast;
    });
    if (overtakes) {
      return {Injection{j->packet, now, fast, j->link}};
    }
  }
  return {};
}

std::vector<Injection> Adversary::speedup_multi(SimTime now) const {
  const auto data = travelling_data(now);
  if (data.size() < std::size_t{cfg_.copies} + 1) {
    return {};
  }
  const Observation* newest = data.back();
  const bool fresh = std::any_of(instant_.begin(), instant_.end(), [&](const Observation& o) {
    return o.packet == newest->packet;
  });
  if (!fresh) {
    return {};
  }
  std::vector<Injection> out;
  SimTime latest_fast{};
  for (std::size_t k = data.size() - cfg_.copies; k < data.size(); ++k) {
    const Observation* o = data[k];
    if (o->packet->sa_id() != newest->packet->sa_id() || o->honest_arrival < now + cfg_.speedup) {
      return {};
    }
    const SimTime fast = o->honest_arrival - cfg_.speedup;
    latest_fast = std::max(latest_fast, fast);
    out.push_back(Injection{o->packet, now, fast, o->link});
  }
  // At least one older segment of the window must still be behind the copies.
  const bool overtakes = std::any_of(data.begin(), data.end() - cfg_.copies, [&](const Observation* v) {
    return v->packet->sa_id() == newest->packet->sa_id() && v->honest_arrival > latest_fast;
  });
  if (!overtakes) {
    return {};
  }
  return out;
}

std::vector<Injection> Adversary::decide(SimTime now) {
  std::vector<Injection> out;
  prune(now);
  if (cfg_.strategy == Strategy::none || now < next_due_ ||
      (cfg_.max_epochs != 0 && stats_.epochs >= cfg_.max_epochs)) {
    instant_.clear();
    return out;
  }
  switch (cfg_.strategy) {
    case Strategy::ack_duplicator: out = duplicate_latest(now, true); break;
    case Strategy::data_duplicator: out = duplicate_latest(now, false); break;
    case Strategy::speedup_single: out = speedup_single(now); break;
    case Strategy::speedup_multi: out = speedup_multi(now); break;
    case Strategy::none: break;
  }
  instant_.clear();
  if (out.empty()) {
    return out;
  }
  if (!budget_.admit(now, out.size())) {
    ++stats_.epochs_skipped;
    next_due_ = now + cfg_.epoch_period;
    return {};
  }
  ++stats_.epochs;
  stats_.injected += out.size();
  next_due_ = now + cfg_.epoch_period;
  std::stable_sort(out.begin(), out.end(), [](const Injection& a, const Injection& b) {
    if (a.deliver_at != b.deliver_at) {
      return a.deliver_at < b.deliver_at;
    }
    return a.packet->esp_seq() < b.packet->esp_seq();
  });
  return out;
}

}  // namespace stealthsim
