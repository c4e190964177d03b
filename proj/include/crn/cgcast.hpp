#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "crn/network.hpp"
#include "crn/payload.hpp"
#include "crn/seek.hpp"
#include "crn/sim.hpp"

namespace crn {

struct CgcastConfig {
  SeekConfig seek;
  /// Coloring runs ceil(phase_mult * ln n) phases.
  double phase_mult = 4.0;
  /// Back-off rounds per dissemination step; default ceil(2 ln n).
  std::optional<int> rounds_per_step;
};

int coloring_phases(const NetworkParams& params, const CgcastConfig& cfg);
int dissemination_rounds(const NetworkParams& params, const CgcastConfig& cfg);

/// One node's agreed channel per neighbor.
struct DedicatedChannelTable {
  /// neighbor -> local label of the channel used at slot min(t_uv, t_vu).
  std::map<NodeId, Label> labels;
  /// neighbor -> min(t_uv, t_vu).
  std::map<NodeId, Slot> meeting_slot;
  /// Neighbors heard in the first run whose times never arrived.
  std::vector<NodeId> flagged;
};

/// Node-local agreement step. `first_heard` is this node's record from the
/// first discovery run, `exchange_log` what it received in the second run
/// (IdentityWithTimes payloads), `label_at` its own tuned label per slot of
/// the first run.
DedicatedChannelTable fix_dedicated_channels(NodeId self, const std::map<NodeId, Slot>& first_heard,
                                             const std::map<NodeId, Payload>& exchange_log,
                                             const std::function<Label(Slot)>& label_at);

/// Result of delivering one ColorInfo per node through discovery runs.
struct ExchangeResult {
  /// Entries each node received, deduplicated and sorted. Own entries are
  /// not included.
  std::vector<std::vector<ColorEntry>> received;
  Slot slots = 0;
  /// False when no node had anything to say and the runs were skipped.
  bool simulated = false;
};

/// One discovery execution carrying `outgoing[u]` from every node u. With
/// two_hop, a second execution relays everything heard in the first, so
/// entries reach nodes two hops away. Runs in which every payload is empty
/// cannot change any node's state; they are accounted in `slots` but not
/// simulated.
ExchangeResult exchange_round(const NetworkInstance& net, const std::vector<ColorInfo>& outgoing,
                              bool two_hop, const SeekConfig& cfg, std::uint64_t seed,
                              std::uint64_t purpose_tag);

/// Per owned line-graph vertex w_{owner, other}.
struct VirtualNode {
  NodeId other = 0;
  std::vector<int> palette;
  std::optional<int> tentative;
  std::optional<int> final_color;
  bool active = true;
};

/// Virtual nodes simulated by one physical node.
struct ColoringState {
  std::vector<VirtualNode> owned;
};

struct ColoringOutcome {
  /// Owner-side state per physical node.
  std::vector<ColoringState> states;
  /// Every virtual node decided within the phase budget.
  bool colored = false;
  /// Phase (1-based) in which the last virtual node decided; 0 if none.
  int phases_used = 0;
  int phase_budget = 0;
  Slot slots = 0;
  /// Edge {u, v} (u < v) -> color, for decided virtual nodes.
  std::map<std::pair<NodeId, NodeId>, int> edge_colors;
};

/// Randomized line-graph node coloring with a palette of 2*delta colors.
/// `known_neighbors[u]` are the neighbors u will use; u owns the virtual
/// node of {u, v} when u < v. Each phase exchanges tentative picks and then
/// decisions, both over two hops.
ColoringOutcome color_line_graph(const NetworkInstance& net,
                                 const std::vector<std::vector<NodeId>>& known_neighbors,
                                 const CgcastConfig& cfg, std::uint64_t seed);

/// True when no two colored edges sharing an endpoint have the same color
/// and every color lies in [1, 2*delta].
bool coloring_proper(const std::map<std::pair<NodeId, NodeId>, int>& edge_colors, int delta);

/// Color -> dedicated local label, per node.
using DisseminationSchedule = std::map<int, Label>;

struct DisseminationResult {
  /// Slot (relative to dissemination start) each node first held the message.
  std::vector<std::optional<Slot>> informed_at;
  /// Length of the schedule: D * 2 delta * R * max(1, ceil(lg delta)).
  Slot slots = 0;
};

class DisseminationMachine {
 public:
  DisseminationMachine(const NodeView& view, DisseminationSchedule schedule, bool source,
                       const Data& message, int rounds_per_step);

  SlotAction act(Slot slot);
  void observe(Slot slot, const SlotObservation& obs);
  bool done() const { return finished_; }

  std::optional<Slot> informed_at() const { return informed_at_; }
  Slot total_slots() const { return total_slots_; }

 private:
  DisseminationSchedule schedule_;
  RngStream rng_;
  Payload message_;
  int colors_;
  int backoff_exp_;
  int backoff_len_;
  Slot step_len_;
  Slot total_slots_;
  bool informed_;
  bool sending_ = false;
  Label step_label_ = 0;
  std::optional<Slot> informed_at_;
  bool finished_ = false;
};

DisseminationResult disseminate(const NetworkInstance& net, NodeId source, const Data& message,
                                const std::vector<DisseminationSchedule>& schedules,
                                int rounds_per_step, std::uint64_t seed);

struct CgcastResult {
  std::vector<std::optional<Slot>> informed_at;
  bool all_informed = false;
  bool colored = false;
  bool proper = false;
  bool channels_agree = false;
  int phases_used = 0;
  int phase_budget = 0;
  int rounds_per_step = 0;
  std::vector<std::pair<NodeId, NodeId>> flagged_edges;
  std::map<std::pair<NodeId, NodeId>, int> edge_colors;

  Slot seek_slots = 0;
  Slot discovery_slots = 0;
  Slot coloring_slots = 0;
  Slot handoff_slots = 0;
  Slot dissemination_slots = 0;
  Slot total_slots = 0;
  /// Slots from dissemination start until the last node was informed.
  std::optional<Slot> dissemination_all_informed;

  /// {colored, phases_used, informed_at: {node: slot}, flagged_edges: [...]}.
  nlohmann::json to_json() const;
};

/// Discovery, times exchange, channel agreement, coloring, color handoff,
/// dissemination. informed_at is counted from the first slot of the whole
/// pipeline; the source holds the message at slot 0.
CgcastResult cgcast(const NetworkInstance& net, NodeId source, const Data& message,
                    const CgcastConfig& cfg, std::uint64_t seed);

}  // namespace crn
