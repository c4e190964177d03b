#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "crn/network.hpp"
#include "crn/payload.hpp"
#include "crn/rng.hpp"
#include "crn/sim.hpp"

namespace crn {

/// Smallest L >= 0 with 2^L >= x (x >= 1).
int ceil_log2(std::int64_t x);

/// Guess-and-verify broadcaster counting on a single channel. Round i
/// (1-based) guesses 2^(i-1) broadcasters and lasts round_len() slots.
struct CountConfig {
  double delta = 0.5;
  int round_len_mult = 8;
  int log_n = 1;
  int num_rounds = 1;

  /// Rounds sized for n nodes and degree bound delta_max.
  static CountConfig make(int n, int delta_max, double delta = 0.5, int round_len_mult = 8);

  /// Heard-slot fraction a round must exceed to fix the estimate.
  double threshold() const;
  int round_len() const { return round_len_mult * log_n; }
  int total_slots() const { return round_len() * num_rounds; }
  std::vector<std::string> problems() const;
};

struct CountResult {
  /// 0 when no round triggered, else 2^(i+1) for trigger round i.
  std::int64_t estimate = 0;
  std::set<NodeId> ids_heard;
  std::optional<int> triggered_round;
};

/// Listener-side running state of one Count execution.
struct CountListenerState {
  int heard_in_round = 0;
  std::optional<int> triggered_round;
  std::set<NodeId> ids_heard;

  /// Counts a heard slot and collects the identity it carried.
  void observe(const SlotObservation& obs);
  /// Closes round `round_i`, fixing the estimate the first time the heard
  /// fraction exceeds the threshold.
  void end_round(int round_i, const CountConfig& cfg);
  std::int64_t estimate() const;
  CountResult result() const;
};

/// Feeds a whole round of observations to the listener and closes it.
CountResult count_listener_step(int round_i, std::span<const SlotObservation> observations,
                                const CountConfig& cfg, CountListenerState& state);

/// Broadcast `payload` on `label` with probability 1/2^(round_i - 1), else
/// stay parked on the channel.
SlotAction count_broadcaster_action(int round_i, Label label, const Payload& payload,
                                    RngStream& rng);

/// Listener on label 1 for one Count execution.
class CountListenerMachine {
 public:
  CountListenerMachine(const NodeView& view, const CountConfig& cfg);
  SlotAction act(Slot slot);
  void observe(Slot slot, const SlotObservation& obs);
  bool done() const { return finished_; }
  CountResult result() const { return state_.result(); }

 private:
  CountConfig cfg_;
  CountListenerState state_;
  bool finished_ = false;
};

/// Broadcaster on label 1 for one Count execution.
class CountBroadcasterMachine {
 public:
  CountBroadcasterMachine(const NodeView& view, const CountConfig& cfg);
  SlotAction act(Slot slot);
  void observe(Slot, const SlotObservation&) {}
  bool done() const { return finished_; }

 private:
  CountConfig cfg_;
  RngStream rng_;
  Payload payload_;
  bool finished_ = false;
};

/// Node 0 listens, nodes 1..m broadcast, all on one shared channel.
NetworkInstance make_count_instance(int m);

/// One Count execution with m broadcasters.
CountResult run_count(int m, const CountConfig& cfg, std::uint64_t seed);

}  // namespace crn
