#include "crn/games.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace crn {

GameInstance::GameInstance(int c, std::vector<Guess> matching)
    : c_(c), matching_(std::move(matching)), partner_(static_cast<std::size_t>(c) + 1, 0) {
  if (c < 1) throw ParameterFault("game needs c >= 1");
  if (matching_.empty() || static_cast<int>(matching_.size()) > c) {
    throw ParameterFault("matching size must lie in [1, c]");
  }
  std::vector<bool> b_used(static_cast<std::size_t>(c) + 1, false);
  for (const auto& e : matching_) {
    if (e.a < 1 || e.a > c || e.b < 1 || e.b > c) throw ParameterFault("matching edge out of range");
    if (partner_[e.a] != 0 || b_used[e.b]) throw ParameterFault("matching is not injective");
    partner_[e.a] = e.b;
    b_used[e.b] = true;
  }
}

bool GameInstance::submit(const Guess& g) {
  ++rounds_;
  return partner_[g.a] == g.b;
}

namespace {

std::vector<int> shuffled_range(int c, RngStream& rng) {
  std::vector<int> v(c);
  std::iota(v.begin(), v.end(), 1);
  for (int i = c - 1; i > 0; --i) std::swap(v[i], v[rng.below(static_cast<std::uint64_t>(i) + 1)]);
  return v;
}

}  // namespace

GameInstance make_game(int c, int k, std::uint64_t seed) {
  if (c < 1 || k < 1 || k > c) {
    throw ParameterFault("need 1 <= k <= c (k=" + std::to_string(k) + ", c=" + std::to_string(c) + ")");
  }
  auto rng = derive_stream(seed, 0, 0x600);
  const auto as = shuffled_range(c, rng);
  const auto bs = shuffled_range(c, rng);
  std::vector<Guess> m;
  for (int i = 0; i < k; ++i) m.push_back({as[i], bs[i]});
  return GameInstance(c, std::move(m));
}

GameInstance game_from_two_node(const NetworkInstance& net) {
  if (net.node_count() != 2) throw ParameterFault("game_from_two_node needs a two-node instance");
  const int c = net.params.c;
  std::vector<Guess> m;
  for (Label a = 1; a <= c; ++a) {
    for (Label b = 1; b <= c; ++b) {
      if (net.global_channel(0, a) == net.global_channel(1, b)) m.push_back({a, b});
    }
  }
  return GameInstance(c, std::move(m));
}

GameResult referee_play(GameInstance& game, PlayerStrategy& player, std::int64_t max_rounds,
                        RngStream rng) {
  if (max_rounds < 1) throw ParameterFault("max_rounds must be >= 1");
  std::vector<Guess> history;
  GameResult r;
  for (std::int64_t round = 1; round <= max_rounds; ++round) {
    const auto g = player.next_guess(PlayerContext{game.c(), game.k(), history, rng});
    if (!g) break;
    if (g->a < 1 || g->a > game.c() || g->b < 1 || g->b > game.c()) {
      throw PlayerFault(player.name() + " guessed (" + std::to_string(g->a) + ", " +
                        std::to_string(g->b) + ") outside [1, " + std::to_string(game.c()) + "]^2");
    }
    if (game.submit(*g)) {
      r.won = true;
      r.rounds = round;
      return r;
    }
    history.push_back(*g);
  }
  r.rounds = max_rounds;
  return r;
}

namespace {

class UniformPlayer final : public PlayerStrategy {
 public:
  std::optional<Guess> next_guess(const PlayerContext& ctx) override {
    const auto c = static_cast<std::int64_t>(ctx.c);
    return Guess{static_cast<int>(ctx.rng.uniform_int(1, c)),
                 static_cast<int>(ctx.rng.uniform_int(1, c))};
  }
  std::string name() const override { return "uniform"; }
};

class FreshPairPlayer final : public PlayerStrategy {
 public:
  std::optional<Guess> next_guess(const PlayerContext& ctx) override {
    const auto i = static_cast<std::int64_t>(ctx.history.size());
    const auto c = static_cast<std::int64_t>(ctx.c);
    if (i >= c * c) throw PlayerFault("fresh-pair exhausted all c^2 edges without a hit");
    return Guess{static_cast<int>(i / c) + 1, static_cast<int>(i % c) + 1};
  }
  std::string name() const override { return "fresh-pair"; }
};

class ReductionPlayer final : public PlayerStrategy {
 public:
  ReductionPlayer(int c, int k, const SeekConfig& cfg, std::uint64_t seed, std::uint64_t tag) {
    const NetworkParams p{2, c, k, k, 1, 1};
    for (NodeId u = 0; u < 2; ++u) {
      nodes_.emplace_back(NodeView{u, p, derive_stream(seed, u, tag)}, cfg, Payload{Identity{u}});
    }
  }

  std::optional<Guess> next_guess(const PlayerContext& ctx) override {
    const auto slot = static_cast<Slot>(ctx.history.size());
    if (slot > 0) {
      // The previous guess missed: the two nodes were on different channels.
      for (auto& m : nodes_) m.observe(slot - 1, SlotObservation::silence());
    }
    if (nodes_[0].done() || nodes_[1].done()) return std::nullopt;
    const auto a = nodes_[0].act(slot);
    const auto b = nodes_[1].act(slot);
    if (a.label == 0 || b.label == 0) return Guess{1, 1};
    return Guess{a.label, b.label};
  }
  std::string name() const override { return "reduction"; }

 private:
  std::vector<SeekMachine> nodes_;
};

}  // namespace

std::unique_ptr<PlayerStrategy> make_uniform_player() { return std::make_unique<UniformPlayer>(); }

std::unique_ptr<PlayerStrategy> make_fresh_pair_player() {
  return std::make_unique<FreshPairPlayer>();
}

std::unique_ptr<PlayerStrategy> make_reduction_player(int c, int k, const SeekConfig& cfg,
                                                      std::uint64_t seed,
                                                      std::uint64_t purpose_tag) {
  if (c < 1 || k < 1 || k > c) throw ParameterFault("reduction player needs 1 <= k <= c");
  return std::make_unique<ReductionPlayer>(c, k, cfg, seed, purpose_tag);
}

std::optional<Slot> first_meeting_slot(const NetworkInstance& net, const SeekConfig& cfg,
                                       std::uint64_t seed, std::uint64_t purpose_tag) {
  if (net.node_count() != 2) throw ParameterFault("first_meeting_slot needs a two-node instance");
  std::optional<Slot> met;
  RunOptions opts;
  opts.slot_budget = seek_budget(net.params, cfg).total_slots();
  opts.master_seed = seed;
  opts.purpose_tag = purpose_tag;
  opts.on_actions = [&](Slot slot, std::span<const SlotAction> acts) {
    if (met || acts[0].label == 0 || acts[1].label == 0) return;
    if (net.global_channel(0, acts[0].label) == net.global_channel(1, acts[1].label)) met = slot;
  };
  opts.stop_when = [&](Slot) { return met.has_value(); };
  run_protocol(
      net, [&](NodeView view) { return SeekMachine(view, cfg, Payload{Identity{view.id}}); }, opts);
  return met;
}

GameStats game_stats(std::span<const GameOutcome> results, std::span<const std::int64_t> curve_at,
                     std::span<const double> quantiles) {
  if (results.empty()) throw ParameterFault("game_stats needs at least one result");
  static constexpr double kDefaultQuantiles[] = {0.1, 0.25, 0.5, 0.75, 0.9};
  if (quantiles.empty()) quantiles = kDefaultQuantiles;

  GameStats s;
  s.count = static_cast<std::int64_t>(results.size());
  std::vector<std::int64_t> rounds;
  std::vector<std::int64_t> wins;
  rounds.reserve(results.size());
  std::int64_t losses = 0;
  for (const auto& r : results) {
    rounds.push_back(r.rounds);
    if (r.won) {
      wins.push_back(r.rounds);
    } else {
      ++losses;
    }
  }
  std::sort(rounds.begin(), rounds.end());
  std::sort(wins.begin(), wins.end());
  const double n = static_cast<double>(s.count);
  s.mean = std::accumulate(rounds.begin(), rounds.end(), 0.0) / n;
  s.loss_fraction = static_cast<double>(losses) / n;

  auto quantile = [&](double q) {
    // Smallest value whose empirical CDF reaches q.
    auto idx = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
    idx = std::clamp<std::size_t>(idx, 1, rounds.size());
    return rounds[idx - 1];
  };
  s.median = quantile(0.5);
  for (double q : quantiles) s.quantiles.emplace_back(q, quantile(q));
  for (auto t : curve_at) {
    const auto within = std::upper_bound(wins.begin(), wins.end(), t) - wins.begin();
    s.curve.emplace_back(t, static_cast<double>(within) / n);
  }
  return s;
}

}  // namespace crn
