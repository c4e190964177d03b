#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "crn/network.hpp"
#include "crn/payload.hpp"
#include "crn/rng.hpp"
#include "crn/types.hpp"

namespace crn {

/// What a node does in one slot. Broadcast payloads are borrowed from the
/// acting machine and must stay valid until its next act() call.
struct SlotAction {
  enum class Kind : std::uint8_t { kIdle, kListen, kBroadcast };

  Kind kind = Kind::kIdle;
  /// Local label in [1, c]. For kIdle, the label the radio stays parked on
  /// (0 when the radio is off); the channel ignores it either way.
  Label label = 0;
  const Payload* payload = nullptr;

  static SlotAction idle(Label parked = 0) { return {Kind::kIdle, parked, nullptr}; }
  static SlotAction listen(Label l) { return {Kind::kListen, l, nullptr}; }
  static SlotAction broadcast(Label l, const Payload& p) { return {Kind::kBroadcast, l, &p}; }

  bool is_idle() const { return kind == Kind::kIdle; }
  bool is_listen() const { return kind == Kind::kListen; }
  bool is_broadcast() const { return kind == Kind::kBroadcast; }
};

/// What a node perceives in one slot: a payload or silence. Collisions and
/// empty channels look the same. The payload pointer is only valid during
/// the observe() call that receives it.
struct SlotObservation {
  const Payload* heard = nullptr;

  static SlotObservation silence() { return {}; }
  bool silent() const { return heard == nullptr; }
};

/// Everything a protocol state machine is allowed to know about itself.
struct NodeView {
  NodeId id = 0;
  NetworkParams params;
  RngStream rng;
};

/// Type-erased per-node state machine. Concrete protocol machines usually
/// avoid the virtual call and are run directly through run_protocol.
class NodeMachine {
 public:
  virtual ~NodeMachine() = default;
  virtual SlotAction act(Slot slot) = 0;
  virtual void observe(Slot slot, const SlotObservation& obs) = 0;
  virtual bool done() const { return false; }
};

/// Applies the reception rule for one slot. Reusable workspace; not
/// thread-safe, one per run.
class SlotResolver {
 public:
  explicit SlotResolver(const NetworkInstance& net);

  /// Throws ConfigurationFault on a wrong action count or an out-of-range
  /// label.
  void resolve(std::span<const SlotAction> actions, std::span<SlotObservation> out);
  /// Physical sender behind the last observation of `listener`, or -1.
  NodeId sender(NodeId listener) const { return sender_[listener]; }

 private:
  const NetworkInstance* net_;
  std::vector<int> hits_;
  std::vector<NodeId> sender_;
  std::vector<ChannelId> listen_on_;
  std::vector<NodeId> touched_;
};

std::vector<SlotObservation> resolve_slot(std::span<const SlotAction> actions,
                                          const NetworkInstance& net);

struct Reception {
  Slot slot = 0;
  NodeId listener = 0;
  NodeId sender = 0;
  bool operator==(const Reception&) const = default;
};

struct NodeSummary {
  std::int64_t receptions = 0;
  std::int64_t broadcasts = 0;
  /// Physical sender -> first slot its transmission reached this node.
  std::map<NodeId, Slot> first_heard_from;
  bool operator==(const NodeSummary&) const = default;
};

struct TraceSummary {
  Slot slots_executed = 0;
  std::vector<NodeSummary> nodes;
  /// Only filled when RunOptions::keep_trace is set.
  std::vector<Reception> trace;
  bool operator==(const TraceSummary&) const = default;
};

struct RunOptions {
  Slot slot_budget = 1;
  std::uint64_t master_seed = 0;
  std::uint64_t purpose_tag = 0;
  bool keep_trace = false;
  /// Evaluated after every slot; the run ends early once it returns true.
  std::function<bool(Slot)> stop_when;
  /// Sees every slot's actions before they are resolved.
  std::function<void(Slot, std::span<const SlotAction>)> on_actions;
};

template <class M>
struct RunResult {
  std::vector<M> machines;
  TraceSummary summary;
};

namespace detail {

template <class M>
concept PointerLike = requires(M m) { m.operator->(); };

template <class M>
SlotAction act(M& m, Slot s) {
  if constexpr (PointerLike<M>) {
    return m->act(s);
  } else {
    return m.act(s);
  }
}

template <class M>
void observe(M& m, Slot s, const SlotObservation& o) {
  if constexpr (PointerLike<M>) {
    m->observe(s, o);
  } else {
    m.observe(s, o);
  }
}

template <class M>
bool done(const M& m) {
  if constexpr (PointerLike<M>) {
    return m->done();
  } else {
    return m.done();
  }
}

void check_action(const SlotAction& a, int c, NodeId node, Slot slot);

}  // namespace detail

struct NoStop {
  template <class Machines>
  bool operator()(Slot, const Machines&) const {
    return false;
  }
};

/// Runs one state machine per node in lock step. `factory(NodeView)` builds
/// node u's machine; u's stream is derive_stream(master_seed, u, purpose_tag).
/// Stops after slot_budget slots, when every machine is done, or when
/// stop_when(slot) or stop(slot, machines) fires after a slot.
template <class Factory, class Stop = NoStop>
auto run_protocol(const NetworkInstance& net, Factory&& factory, const RunOptions& opts,
                  Stop&& stop = {}) -> RunResult<std::invoke_result_t<Factory&, NodeView>> {
  using M = std::invoke_result_t<Factory&, NodeView>;
  if (opts.slot_budget < 1) throw ConfigurationFault("slot_budget must be >= 1");
  const int n = net.node_count();
  RunResult<M> result;
  result.machines.reserve(n);
  for (NodeId u = 0; u < n; ++u) {
    result.machines.push_back(
        factory(NodeView{u, net.params, derive_stream(opts.master_seed, u, opts.purpose_tag)}));
  }
  auto& summary = result.summary;
  summary.nodes.assign(n, {});

  SlotResolver resolver(net);
  std::vector<SlotAction> actions(n);
  std::vector<SlotObservation> obs(n);
  Slot slot = 0;
  for (; slot < opts.slot_budget; ++slot) {
    bool all_done = true;
    for (NodeId u = 0; u < n; ++u) {
      if (!detail::done(result.machines[u])) {
        all_done = false;
        break;
      }
    }
    if (all_done && n > 0) break;

    for (NodeId u = 0; u < n; ++u) {
      actions[u] = detail::act(result.machines[u], slot);
      detail::check_action(actions[u], net.params.c, u, slot);
    }
    if (opts.on_actions) opts.on_actions(slot, actions);
    resolver.resolve(actions, obs);
    for (NodeId u = 0; u < n; ++u) {
      if (actions[u].is_broadcast()) ++summary.nodes[u].broadcasts;
      if (!obs[u].silent()) {
        auto& ns = summary.nodes[u];
        ++ns.receptions;
        const NodeId from = resolver.sender(u);
        ns.first_heard_from.try_emplace(from, slot);
        if (opts.keep_trace) summary.trace.push_back({slot, u, from});
      }
      detail::observe(result.machines[u], slot, obs[u]);
    }
    if ((opts.stop_when && opts.stop_when(slot)) || stop(slot, result.machines)) {
      ++slot;
      break;
    }
  }
  summary.slots_executed = slot;
  return result;
}

/// Per-node record of the trace summary JSON export.
struct NodeTraceRecord {
  std::vector<NodeId> discovered;
  std::map<NodeId, Slot> first_heard;
  std::optional<Slot> informed_at;
};

nlohmann::json trace_summary_json(std::int64_t trial, Slot slot_budget,
                                  const std::vector<NodeTraceRecord>& per_node);

}  // namespace crn
