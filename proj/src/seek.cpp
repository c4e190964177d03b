#include "crn/seek.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace crn {

SeekBudget seek_budget(const NetworkParams& p, const SeekConfig& cfg) {
  if (cfg.a1 <= 0.0 || cfg.a2 <= 0.0) throw ParameterFault("seek multipliers must be > 0");
  if (cfg.log_base <= 1.0) throw ParameterFault("seek log_base must be > 1");
  if (p.n < 2) throw ParameterFault("seek needs n >= 2");
  SeekBudget b;
  const double log_n = std::log(static_cast<double>(p.n)) / std::log(cfg.log_base);
  const double c = p.c;
  const double delta = p.delta_max;
  if (cfg.mode == SeekMode::kFull) {
    b.part1_steps = static_cast<std::int64_t>(std::ceil(cfg.a1 * (c * c / p.k) * log_n));
    b.part2_steps = static_cast<std::int64_t>(
        std::ceil(cfg.a2 * (static_cast<double>(p.k_max) / p.k) * delta * log_n));
  } else {
    if (cfg.k_hat < p.k) {
      throw ParameterFault("k_hat (" + std::to_string(cfg.k_hat) + ") must be >= k (" +
                           std::to_string(p.k) + ")");
    }
    const double kh = cfg.k_hat;
    b.part1_steps = static_cast<std::int64_t>(std::ceil(cfg.a1 * (c * c / kh) * log_n));
    const double good = cfg.delta_khat ? *cfg.delta_khat : delta;
    const double extra = cfg.delta_khat ? delta + c : c;
    b.part2_steps = static_cast<std::int64_t>(
        std::ceil(cfg.a2 * ((p.k_max / kh) * good + extra) * log_n));
  }
  b.count = CountConfig::make(p.n, p.delta_max, cfg.count_delta, cfg.count_round_mult);
  if (auto problems = b.count.problems(); !problems.empty()) throw ParameterFault(problems.front());
  b.count_len = b.count.total_slots();
  b.backoff_exp = ceil_log2(std::max(1, p.delta_max));
  b.backoff_len = std::max(1, b.backoff_exp);
  return b;
}

Part1Plan part1_step(int c, RngStream& rng) {
  Part1Plan plan;
  plan.label = static_cast<Label>(rng.uniform_int(1, c));
  plan.listener = rng.coin();
  return plan;
}

Label weighted_channel_pick(std::span<const std::int64_t> counts, std::int64_t sum, RngStream& rng) {
  const auto c = static_cast<std::int64_t>(counts.size());
  if (sum <= 0) return static_cast<Label>(rng.uniform_int(1, c));
  std::int64_t r = rng.uniform_int(1, sum);
  Label ch = 1;
  while (ch < c && r > counts[ch - 1]) {
    r -= counts[ch - 1];
    ++ch;
  }
  return ch;
}

Part2Plan part2_step(const SeekState& state, const SeekBudget& budget, RngStream& rng) {
  Part2Plan plan;
  plan.listener = rng.coin();
  const int c = static_cast<int>(state.counts.size());
  if (plan.listener) {
    plan.label = weighted_channel_pick(state.counts, state.sum, rng);
    return plan;
  }
  plan.label = static_cast<Label>(rng.uniform_int(1, c));
  for (int i = 1; i <= budget.backoff_len; ++i) {
    // 2^(i-1) / 2^exp == 1 / 2^(exp - i + 1); slots past exp always fire.
    const int shift = std::max(0, budget.backoff_exp - i + 1);
    if (rng.one_in(std::uint64_t{1} << shift)) plan.fire_mask |= std::uint64_t{1} << (i - 1);
  }
  return plan;
}

SeekMachine::SeekMachine(const NodeView& view, const SeekConfig& cfg, Payload payload)
    : id_(view.id),
      c_(view.params.c),
      budget_(seek_budget(view.params, cfg)),
      rng_(view.rng),
      payload_(std::move(payload)) {
  state_.counts.assign(c_, 0);
  step_labels_.reserve(static_cast<std::size_t>(budget_.part1_steps + budget_.part2_steps));
}

void SeekMachine::begin_step(Slot slot) {
  ++step_index_;
  step_start_ = slot;
  part1_ = step_index_ < budget_.part1_steps;
  if (part1_) {
    const auto plan = part1_step(c_, rng_);
    label_ = plan.label;
    listener_ = plan.listener;
    fire_mask_ = 0;
    heard_in_round_ = 0;
    triggered_round_.reset();
    step_end_ = slot + budget_.count_len;
  } else {
    const auto plan = part2_step(state_, budget_, rng_);
    label_ = plan.label;
    listener_ = plan.listener;
    fire_mask_ = plan.fire_mask;
    step_end_ = slot + budget_.backoff_len;
  }
  step_labels_.push_back(label_);
}

SlotAction SeekMachine::act(Slot slot) {
  if (finished_) return SlotAction::idle();
  if (step_index_ < 0 || slot >= step_end_) begin_step(slot);
  if (listener_) return SlotAction::listen(label_);
  const auto offset = slot - step_start_;
  if (part1_) {
    const int round = static_cast<int>(offset / budget_.count.round_len()) + 1;
    return count_broadcaster_action(round, label_, payload_, rng_);
  }
  if ((fire_mask_ >> offset) & 1U) return SlotAction::broadcast(label_, payload_);
  return SlotAction::idle(label_);
}

void SeekMachine::observe(Slot slot, const SlotObservation& obs) {
  if (finished_) return;
  if (listener_ && !obs.silent()) {
    if (part1_) ++heard_in_round_;
    if (auto id = sender_of(*obs.heard)) {
      state_.ids.insert(*id);
      if (state_.first_heard.try_emplace(*id, slot).second) {
        state_.payload_log.try_emplace(*id, *obs.heard);
      }
    }
  }
  if (part1_ && listener_) {
    const auto offset = slot - step_start_;
    const int round_len = budget_.count.round_len();
    if ((offset + 1) % round_len == 0) {
      const int round = static_cast<int>((offset + 1) / round_len);
      if (!triggered_round_ &&
          static_cast<double>(heard_in_round_) / round_len > budget_.count.threshold()) {
        triggered_round_ = round;
      }
      heard_in_round_ = 0;
    }
    if (slot + 1 == step_end_ && triggered_round_) {
      const std::int64_t estimate = std::int64_t{1} << (*triggered_round_ + 1);
      state_.counts[label_ - 1] += estimate;
      state_.sum += estimate;
    }
  }
  if (slot + 1 == step_end_ && step_index_ + 1 >= budget_.part1_steps + budget_.part2_steps) {
    finished_ = true;
  }
}

Label SeekMachine::label_at(Slot slot) const {
  if (slot < 0) return 0;
  std::int64_t step;
  if (slot < budget_.part1_slots()) {
    step = slot / budget_.count_len;
  } else {
    step = budget_.part1_steps + (slot - budget_.part1_slots()) / budget_.backoff_len;
  }
  if (step >= static_cast<std::int64_t>(step_labels_.size())) return 0;
  return step_labels_[static_cast<std::size_t>(step)];
}

RunResult<SeekMachine> run_seek(const NetworkInstance& net, const SeekConfig& cfg, std::uint64_t seed,
                                std::uint64_t purpose_tag, const std::vector<Payload>* payloads,
                                const SeekStop& stop) {
  const auto budget = seek_budget(net.params, cfg);
  if (payloads && static_cast<int>(payloads->size()) != net.node_count()) {
    throw ConfigurationFault("run_seek: need one payload per node");
  }
  RunOptions opts;
  opts.slot_budget = budget.total_slots();
  opts.master_seed = seed;
  opts.purpose_tag = purpose_tag;
  return run_protocol(
      net,
      [&](NodeView view) {
        Payload p = payloads ? (*payloads)[view.id] : Payload{Identity{view.id}};
        return SeekMachine(view, cfg, std::move(p));
      },
      opts,
      [&stop](Slot slot, const std::vector<SeekMachine>& machines) {
        return stop && stop(slot, machines);
      });
}

RunResult<SeekMachine> cseek(const NetworkInstance& net, SeekConfig cfg, std::uint64_t seed) {
  cfg.mode = SeekMode::kFull;
  return run_seek(net, cfg, seed);
}

RunResult<SeekMachine> ckseek(const NetworkInstance& net, SeekConfig cfg, std::uint64_t seed) {
  cfg.mode = SeekMode::kFilter;
  if (cfg.k_hat < net.params.k) {
    throw ParameterFault("k_hat (" + std::to_string(cfg.k_hat) + ") must be >= k (" +
                         std::to_string(net.params.k) + ")");
  }
  return run_seek(net, cfg, seed);
}

std::vector<NodeId> neighbors_with_overlap(const NetworkInstance& net, NodeId u, int min_overlap) {
  std::vector<NodeId> out;
  for (NodeId v : net.adjacency[u]) {
    if (net.overlap(u, v) >= min_overlap) out.push_back(v);
  }
  return out;
}

bool discovery_sound(const NetworkInstance& net, std::span<const SeekMachine> machines) {
  for (const auto& m : machines) {
    for (NodeId v : m.state().ids) {
      if (v < 0 || v >= net.node_count() || !net.adjacent(m.id(), v)) return false;
    }
  }
  return true;
}

bool discovery_complete(const NetworkInstance& net, std::span<const SeekMachine> machines,
                        int min_overlap) {
  for (const auto& m : machines) {
    for (NodeId v : neighbors_with_overlap(net, m.id(), min_overlap)) {
      if (!m.state().ids.contains(v)) return false;
    }
  }
  return true;
}

std::optional<Slot> slots_to_discovery(const NetworkInstance& net,
                                       std::span<const SeekMachine> machines, int min_overlap) {
  Slot last = 0;
  for (const auto& m : machines) {
    const auto& fh = m.state().first_heard;
    for (NodeId v : neighbors_with_overlap(net, m.id(), min_overlap)) {
      auto it = fh.find(v);
      if (it == fh.end()) return std::nullopt;
      last = std::max(last, it->second + 1);
    }
  }
  return last;
}

}  // namespace crn
