#include "crn/count.hpp"

#include <cmath>

namespace crn {

int ceil_log2(std::int64_t x) {
  int l = 0;
  while ((std::int64_t{1} << l) < x) ++l;
  return l;
}

CountConfig CountConfig::make(int n, int delta_max, double delta, int round_len_mult) {
  CountConfig cfg;
  cfg.delta = delta;
  cfg.round_len_mult = round_len_mult;
  cfg.log_n = std::max(1, ceil_log2(n));
  cfg.num_rounds = std::max(1, ceil_log2(2 * static_cast<std::int64_t>(std::max(1, delta_max))));
  return cfg;
}

double CountConfig::threshold() const { return (1.0 + delta) * 8.0 * std::exp(-7.0); }

std::vector<std::string> CountConfig::problems() const {
  std::vector<std::string> out;
  if (!(delta > 0.0 && delta < 1.0)) out.push_back("count: delta must lie in (0,1)");
  if (threshold() >= (1.0 - delta) * 2.0 * std::exp(-4.0)) {
    out.push_back("count: detection gap closed, need (1+d)8e^-7 < (1-d)2e^-4");
  }
  if (round_len_mult < 1) out.push_back("count: round length multiplier must be >= 1");
  if (log_n < 1 || num_rounds < 1) out.push_back("count: need log_n >= 1 and num_rounds >= 1");
  return out;
}

void CountListenerState::observe(const SlotObservation& obs) {
  if (obs.silent()) return;
  ++heard_in_round;
  if (auto id = sender_of(*obs.heard)) ids_heard.insert(*id);
}

void CountListenerState::end_round(int round_i, const CountConfig& cfg) {
  if (!triggered_round) {
    const double fraction = static_cast<double>(heard_in_round) / cfg.round_len();
    if (fraction > cfg.threshold()) triggered_round = round_i;
  }
  heard_in_round = 0;
}

std::int64_t CountListenerState::estimate() const {
  return triggered_round ? (std::int64_t{1} << (*triggered_round + 1)) : 0;
}

CountResult CountListenerState::result() const {
  return CountResult{estimate(), ids_heard, triggered_round};
}

CountResult count_listener_step(int round_i, std::span<const SlotObservation> observations,
                                const CountConfig& cfg, CountListenerState& state) {
  for (const auto& o : observations) state.observe(o);
  state.end_round(round_i, cfg);
  return state.result();
}

SlotAction count_broadcaster_action(int round_i, Label label, const Payload& payload,
                                    RngStream& rng) {
  if (rng.one_in(std::uint64_t{1} << (round_i - 1))) return SlotAction::broadcast(label, payload);
  return SlotAction::idle(label);
}

CountListenerMachine::CountListenerMachine(const NodeView&, const CountConfig& cfg) : cfg_(cfg) {}

SlotAction CountListenerMachine::act(Slot) { return SlotAction::listen(1); }

void CountListenerMachine::observe(Slot slot, const SlotObservation& obs) {
  state_.observe(obs);
  if ((slot + 1) % cfg_.round_len() == 0) {
    state_.end_round(static_cast<int>((slot + 1) / cfg_.round_len()), cfg_);
  }
  if (slot + 1 >= cfg_.total_slots()) finished_ = true;
}

CountBroadcasterMachine::CountBroadcasterMachine(const NodeView& view, const CountConfig& cfg)
    : cfg_(cfg), rng_(view.rng), payload_(Identity{view.id}) {}

SlotAction CountBroadcasterMachine::act(Slot slot) {
  if (slot + 1 >= cfg_.total_slots()) finished_ = true;
  const int round = static_cast<int>(slot / cfg_.round_len()) + 1;
  return count_broadcaster_action(round, 1, payload_, rng_);
}

NetworkInstance make_count_instance(int m) {
  NetworkInstance net;
  net.adjacency.assign(m + 1, {});
  for (NodeId v = 1; v <= m; ++v) {
    net.adjacency[0].push_back(v);
    net.adjacency[v].push_back(0);
  }
  net.channel_sets.assign(m + 1, {0});
  net.label_perms.assign(m + 1, {0});
  net.params = NetworkParams{m + 1, 1, 1, 1, std::max(m, 1), m > 0 ? (m > 1 ? 2 : 1) : 0};
  return net;
}

namespace {

// Variant so one run can hold both roles without a virtual call.
class CountRole {
 public:
  CountRole(CountListenerMachine l) : listener_(std::move(l)) {}
  CountRole(CountBroadcasterMachine b) : broadcaster_(std::move(b)) {}
  SlotAction act(Slot s) { return listener_ ? listener_->act(s) : broadcaster_->act(s); }
  void observe(Slot s, const SlotObservation& o) {
    if (listener_) listener_->observe(s, o);
  }
  bool done() const { return listener_ ? listener_->done() : broadcaster_->done(); }
  const std::optional<CountListenerMachine>& listener() const { return listener_; }

 private:
  std::optional<CountListenerMachine> listener_;
  std::optional<CountBroadcasterMachine> broadcaster_;
};

}  // namespace

CountResult run_count(int m, const CountConfig& cfg, std::uint64_t seed) {
  const auto net = make_count_instance(m);
  RunOptions opts;
  opts.slot_budget = cfg.total_slots();
  opts.master_seed = seed;
  opts.purpose_tag = 0xC0;
  auto run = run_protocol(
      net,
      [&cfg](NodeView view) {
        if (view.id == 0) return CountRole(CountListenerMachine(view, cfg));
        return CountRole(CountBroadcasterMachine(view, cfg));
      },
      opts);
  return run.machines[0].listener()->result();
}

}  // namespace crn
