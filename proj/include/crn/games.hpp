#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crn/network.hpp"
#include "crn/rng.hpp"
#include "crn/seek.hpp"

namespace crn {

/// A proposed edge (a, b), both sides 1-based in [1, c].
struct Guess {
  int a = 1;
  int b = 1;
  friend bool operator==(const Guess&, const Guess&) = default;
};

/// Hitting game over A = B = [1, c] with a hidden k-matching. The complete
/// variant has k = c.
class GameInstance {
 public:
  GameInstance(int c, std::vector<Guess> matching);

  int c() const { return c_; }
  int k() const { return static_cast<int>(matching_.size()); }
  bool complete() const { return k() == c_; }
  std::int64_t rounds_elapsed() const { return rounds_; }

  /// Referee side: scores one guess and advances the round counter.
  bool submit(const Guess& g);
  /// Referee side only; players never get a reference to the instance.
  std::span<const Guess> hidden_matching() const { return matching_; }

 private:
  int c_;
  std::vector<Guess> matching_;
  std::vector<int> partner_;  // partner_[a] = matched b or 0
  std::int64_t rounds_ = 0;
};

/// Uniform random k-matching (k = c gives the complete variant).
GameInstance make_game(int c, int k, std::uint64_t seed);

/// The matching hidden in a two-node instance: (a, b) is in M when u's
/// label a and v's label b name the same global channel.
GameInstance game_from_two_node(const NetworkInstance& net);

/// What a player may see: the game size and its own losing guesses.
struct PlayerContext {
  int c = 0;
  int k = 0;
  std::span<const Guess> history;
  RngStream& rng;
};

class PlayerStrategy {
 public:
  virtual ~PlayerStrategy() = default;
  /// nullopt means the player has nothing left to propose and forfeits.
  virtual std::optional<Guess> next_guess(const PlayerContext& ctx) = 0;
  virtual std::string name() const = 0;
};

struct GameResult {
  bool won = false;
  std::int64_t rounds = 0;
};

/// Plays until the first hit or max_rounds. Throws PlayerFault on a guess
/// outside [1, c]^2. A forfeit loses all remaining rounds.
GameResult referee_play(GameInstance& game, PlayerStrategy& player, std::int64_t max_rounds,
                        RngStream rng);

/// I.i.d. uniform over the c^2 edges.
std::unique_ptr<PlayerStrategy> make_uniform_player();
/// Every edge once, row-major.
std::unique_ptr<PlayerStrategy> make_fresh_pair_player();

/// Replays a two-node discovery execution: round r proposes the labels the
/// two simulated nodes are tuned to in slot r-1, and a miss is fed back as
/// silence. A radio that is off proposes (1, 1). `seed` and `purpose_tag`
/// give the same node streams run_seek would use.
std::unique_ptr<PlayerStrategy> make_reduction_player(int c, int k, const SeekConfig& cfg,
                                                      std::uint64_t seed,
                                                      std::uint64_t purpose_tag = 0);

/// First slot in which both nodes of a simulated two-node CSeek run are
/// tuned (listening, broadcasting or parked) to a common global channel.
std::optional<Slot> first_meeting_slot(const NetworkInstance& net, const SeekConfig& cfg,
                                       std::uint64_t seed, std::uint64_t purpose_tag = 0);

struct GameOutcome {
  bool won = false;
  std::int64_t rounds = 0;
};

struct GameStats {
  std::int64_t count = 0;
  /// Losses enter the order statistics at their (capped) round count.
  double mean = 0.0;
  std::int64_t median = 0;
  std::vector<std::pair<double, std::int64_t>> quantiles;
  double loss_fraction = 0.0;
  /// (t, P[won within t rounds]).
  std::vector<std::pair<std::int64_t, double>> curve;
};

/// Quantile q is the smallest t with empirical CDF >= q. Throws
/// ParameterFault on empty input.
GameStats game_stats(std::span<const GameOutcome> results,
                     std::span<const std::int64_t> curve_at = {},
                     std::span<const double> quantiles = {});

}  // namespace crn
