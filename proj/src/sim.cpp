#include "crn/sim.hpp"

#include <string>

namespace crn {

SlotResolver::SlotResolver(const NetworkInstance& net)
    : net_(&net),
      hits_(net.node_count(), 0),
      sender_(net.node_count(), -1),
      listen_on_(net.node_count(), -1) {}

void SlotResolver::resolve(std::span<const SlotAction> actions, std::span<SlotObservation> out) {
  const auto& net = *net_;
  const int n = net.node_count();
  if (static_cast<int>(actions.size()) != n || static_cast<int>(out.size()) != n) {
    throw ConfigurationFault("resolve_slot: expected one action per node (" + std::to_string(n) +
                             "), got " + std::to_string(actions.size()));
  }
  const int c = net.params.c;
  for (NodeId u = 0; u < n; ++u) {
    const auto& a = actions[u];
    if (!a.is_idle() && (a.label < 1 || a.label > c)) {
      throw ConfigurationFault("resolve_slot: node " + std::to_string(u) + " used label " +
                               std::to_string(a.label) + " outside [1," + std::to_string(c) + "]");
    }
    listen_on_[u] = a.is_listen() ? net.global_channel(u, a.label) : -1;
    out[u] = SlotObservation::silence();
    sender_[u] = -1;
  }
  for (NodeId b = 0; b < n; ++b) {
    const auto& a = actions[b];
    if (!a.is_broadcast()) continue;
    if (a.payload == nullptr) {
      throw ConfigurationFault("resolve_slot: node " + std::to_string(b) + " broadcast without payload");
    }
    const ChannelId g = net.global_channel(b, a.label);
    for (NodeId w : net.adjacency[b]) {
      if (listen_on_[w] != g) continue;
      if (hits_[w]++ == 0) {
        touched_.push_back(w);
        sender_[w] = b;
      }
    }
  }
  for (NodeId w : touched_) {
    if (hits_[w] == 1) {
      out[w].heard = actions[sender_[w]].payload;
    } else {
      sender_[w] = -1;
    }
    hits_[w] = 0;
  }
  touched_.clear();
}

std::vector<SlotObservation> resolve_slot(std::span<const SlotAction> actions,
                                          const NetworkInstance& net) {
  std::vector<SlotObservation> out(actions.size());
  SlotResolver(net).resolve(actions, out);
  return out;
}

namespace detail {

void check_action(const SlotAction& a, int c, NodeId node, Slot slot) {
  if (a.is_idle()) {
    if (a.label < 0 || a.label > c) throw SimulationAbort(node, slot, "idle parked on invalid label");
    return;
  }
  if (a.label < 1 || a.label > c) {
    throw SimulationAbort(node, slot, "label " + std::to_string(a.label) + " outside [1," +
                                          std::to_string(c) + "]");
  }
  if (a.is_broadcast() && a.payload == nullptr) {
    throw SimulationAbort(node, slot, "broadcast without payload");
  }
}

}  // namespace detail

nlohmann::json trace_summary_json(std::int64_t trial, Slot slot_budget,
                                  const std::vector<NodeTraceRecord>& per_node) {
  nlohmann::json nodes = nlohmann::json::object();
  for (std::size_t u = 0; u < per_node.size(); ++u) {
    const auto& r = per_node[u];
    nlohmann::json fh = nlohmann::json::object();
    for (auto [id, s] : r.first_heard) fh[std::to_string(id)] = s;
    nodes[std::to_string(u)] = {
        {"discovered", r.discovered},
        {"first_heard", fh},
        {"informed_at", r.informed_at ? nlohmann::json(*r.informed_at) : nlohmann::json(nullptr)}};
  }
  return {{"trial", trial}, {"slot_budget", slot_budget}, {"per_node", nodes}};
}

}  // namespace crn
