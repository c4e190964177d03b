#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "crn/count.hpp"
#include "crn/network.hpp"
#include "crn/payload.hpp"
#include "crn/rng.hpp"
#include "crn/sim.hpp"

namespace crn {

enum class SeekMode { kFull, kFilter };

/// Constants of a neighbor discovery run. The multipliers a1/a2 scale the
/// part-one and part-two step counts, which grow with log_{log_base} n.
struct SeekConfig {
  SeekMode mode = SeekMode::kFull;
  /// Filter mode: target overlap (good neighbors share >= k_hat channels).
  int k_hat = 0;
  /// Filter mode: max number of good neighbors, when known.
  std::optional<int> delta_khat;
  double a1 = 4.0;
  double a2 = 4.0;
  double log_base = 2.0;
  double count_delta = 0.5;
  int count_round_mult = 8;
};

struct SeekBudget {
  std::int64_t part1_steps = 0;
  std::int64_t part2_steps = 0;
  /// Slots per part-one step (one Count execution).
  int count_len = 0;
  /// Slots per part-two step, max(1, ceil(lg delta)).
  int backoff_len = 0;
  /// ceil(lg delta); slot i of a back-off block fires w.p. 2^(i-1)/2^exp.
  int backoff_exp = 0;
  CountConfig count;

  Slot part1_slots() const { return part1_steps * count_len; }
  Slot part2_slots() const { return part2_steps * backoff_len; }
  Slot total_slots() const { return part1_slots() + part2_slots(); }
};

/// Closed-form budget. Throws ParameterFault for filter mode with k_hat < k.
SeekBudget seek_budget(const NetworkParams& params, const SeekConfig& cfg);

struct SeekState {
  /// counts[l - 1]: Count estimates accumulated on local label l.
  std::vector<std::int64_t> counts;
  std::int64_t sum = 0;
  std::set<NodeId> ids;
  /// Slot (relative to run start) of the first reception from each id.
  std::map<NodeId, Slot> first_heard;
  /// First payload received from each id.
  std::map<NodeId, Payload> payload_log;
};

struct Part1Plan {
  Label label = 1;
  bool listener = false;
};

struct Part2Plan {
  Label label = 1;
  bool listener = false;
  /// Broadcaster: bit i-1 set when slot i of the step fires.
  std::uint64_t fire_mask = 0;
};

/// Uniform channel plus a fair role coin.
Part1Plan part1_step(int c, RngStream& rng);

/// Label l with probability counts[l-1]/sum; uniform when sum is 0.
Label weighted_channel_pick(std::span<const std::int64_t> counts, std::int64_t sum, RngStream& rng);

/// Role coin, then a uniform channel and back-off pattern for a
/// broadcaster or a count-weighted channel for a listener.
Part2Plan part2_step(const SeekState& state, const SeekBudget& budget, RngStream& rng);

/// One node of a CSeek / CkSeek execution. Every payload it broadcasts is
/// the one fixed at construction.
class SeekMachine {
 public:
  SeekMachine(const NodeView& view, const SeekConfig& cfg, Payload payload);

  SlotAction act(Slot slot);
  void observe(Slot slot, const SlotObservation& obs);
  bool done() const { return finished_; }

  NodeId id() const { return id_; }
  const SeekState& state() const { return state_; }
  const SeekBudget& budget() const { return budget_; }
  const Payload& payload() const { return payload_; }
  /// Local label this node was tuned to during `slot`.
  Label label_at(Slot slot) const;

 private:
  void begin_step(Slot slot);

  NodeId id_;
  int c_;
  SeekBudget budget_;
  RngStream rng_;
  Payload payload_;
  SeekState state_;

  bool finished_ = false;
  Slot step_end_ = 0;
  Slot step_start_ = 0;
  std::int64_t step_index_ = -1;
  bool part1_ = true;
  Label label_ = 1;
  bool listener_ = false;
  std::uint64_t fire_mask_ = 0;
  int heard_in_round_ = 0;
  std::optional<int> triggered_round_;
  std::vector<Label> step_labels_;
};

using SeekStop = std::function<bool(Slot, const std::vector<SeekMachine>&)>;

/// Runs one CSeek/CkSeek execution on every node. `payloads` (one per node)
/// replaces the default Identity payload. `stop` may end the run early; it
/// only sees the machines, it never feeds anything back into them.
RunResult<SeekMachine> run_seek(const NetworkInstance& net, const SeekConfig& cfg, std::uint64_t seed,
                                std::uint64_t purpose_tag = 0,
                                const std::vector<Payload>* payloads = nullptr,
                                const SeekStop& stop = {});

/// Full neighbor discovery.
RunResult<SeekMachine> cseek(const NetworkInstance& net, SeekConfig cfg, std::uint64_t seed);
/// k_hat-neighbor discovery. Throws ParameterFault when k_hat < k.
RunResult<SeekMachine> ckseek(const NetworkInstance& net, SeekConfig cfg, std::uint64_t seed);

/// Neighbors of u sharing at least `min_overlap` channels.
std::vector<NodeId> neighbors_with_overlap(const NetworkInstance& net, NodeId u, int min_overlap);

/// No node discovered a non-neighbor.
bool discovery_sound(const NetworkInstance& net, std::span<const SeekMachine> machines);
/// Every node discovered every neighbor with overlap >= min_overlap.
bool discovery_complete(const NetworkInstance& net, std::span<const SeekMachine> machines,
                        int min_overlap = 1);
/// Slots until the last required (node, neighbor) discovery, or nullopt
/// when some required neighbor was never found.
std::optional<Slot> slots_to_discovery(const NetworkInstance& net,
                                       std::span<const SeekMachine> machines, int min_overlap = 1);

}  // namespace crn
