// Statistical acceptance suite. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "crn/cgcast.hpp"
#include "crn/games.hpp"
#include "crn/harness.hpp"
#include "crn/topology.hpp"

using namespace crn;
using nlohmann::json;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail, double secs) {
  std::printf("[%s] %d %s: %s (%.1fs)\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(), secs);
  std::fflush(stdout);
  if (!ok) ++failures;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int prec = 3) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

double rate(std::int64_t hits, std::int64_t total) {
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

// Lower median of a sample; failures are passed in as INT64_MAX.
std::int64_t median_of(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

std::vector<int> bfs_dist(const std::vector<std::vector<NodeId>>& adj, NodeId src) {
  std::vector<int> d(adj.size(), -1);
  std::queue<NodeId> q;
  d[src] = 0;
  q.push(src);
  while (!q.empty()) {
    const auto u = q.front();
    q.pop();
    for (auto v : adj[u]) {
      if (d[v] < 0) {
        d[v] = d[u] + 1;
        q.push(v);
      }
    }
  }
  return d;
}

int diameter_of(const std::vector<std::vector<NodeId>>& adj) {
  int best = 0;
  for (NodeId u = 0; u < static_cast<NodeId>(adj.size()); ++u) {
    for (int d : bfs_dist(adj, u)) best = std::max(best, d);
  }
  return best;
}

int degree_of(const std::vector<std::vector<NodeId>>& adj) {
  std::size_t best = 0;
  for (const auto& a : adj) best = std::max(best, a.size());
  return static_cast<int>(best);
}

int ceil_lg(int x) {
  int e = 0;
  while ((1 << e) < x) ++e;
  return e;
}

// Slope of the least-squares line through (ln x, ln y).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Every colored edge is a graph edge, colors lie in [1, 2 delta] and no two
// edges at a common endpoint share a color.
bool proper_edge_coloring(const NetworkInstance& net, const std::map<std::pair<NodeId, NodeId>, int>& colors,
                          int delta) {
  std::map<NodeId, std::set<int>> used;
  for (const auto& [e, col] : colors) {
    if (!net.adjacent(e.first, e.second)) return false;
    if (col < 1 || col > 2 * delta) return false;
    if (!used[e.first].insert(col).second) return false;
    if (!used[e.second].insert(col).second) return false;
  }
  return true;
}

std::size_t edge_count(const NetworkInstance& net) {
  std::size_t e = 0;
  for (const auto& a : net.adjacency) e += a.size();
  return e / 2;
}

RunOutput run_json(const json& j) { return run(config_from_json(j)); }

std::string csv_of(const RunOutput& out) {
  std::ostringstream os;
  write_csv(os, out);
  return os.str();
}

// ---------------------------------------------------------------------------

void count_accuracy() {
  Timer t;
  bool ok = true;
  std::string detail;
  for (int m : {1, 3, 8, 17, 32}) {
    const auto out = run_json({{"scenario", "count"},
                               {"count", {{"m", m}, {"n", 64}, {"delta", 32}}},
                               {"protocol", {{"count_delta", 0.5}, {"count_round_mult", 8}}},
                               {"trials", 500},
                               {"master_seed", 101}});
    int in_band = 0;
    for (const auto& r : out.trials) {
      const auto e = r.metrics.at("estimate");
      in_band += e >= m && e <= 4 * m;
    }
    const double p = rate(in_band, 500);
    ok = ok && p >= 0.95;
    detail += "m=" + std::to_string(m) + ":" + fmt(p) + " ";
  }
  report(1, "count estimate in [m, 4m] >= 95%", ok, detail, t.seconds());
}

void cseek_completeness() {
  Timer t;
  const auto out = run_json({{"scenario", "cseek"},
                             {"instance",
                              {{"generator", "random"},
                               {"n", 32},
                               {"pool", 24},
                               {"c", 8},
                               {"k", 2},
                               {"density", 0.3}}},
                             {"protocol", {{"a1", 4}, {"a2", 4}}},
                             {"trials", 100},
                             {"master_seed", 202}});
  int complete = 0;
  int sound = 0;
  for (const auto& r : out.trials) {
    complete += r.metrics.at("missing_pairs") == 0 && r.metrics.at("false_pairs") == 0;
    sound += r.metrics.at("false_pairs") == 0;
  }
  const bool ok = complete >= 95 && sound == 100;
  report(2, "cseek exact discovery >= 95%, soundness 100%", ok,
         "exact " + std::to_string(complete) + "/100, sound " + std::to_string(sound) + "/100",
         t.seconds());
}

// Median slots-to-full-discovery over a star sweep; nullopt if any point has
// no finite median.
std::optional<double> star_slope(const std::string& axis, const std::vector<int>& values, int c, int k,
                                 int delta, std::string& detail) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (int v : values) {
    json inst = {{"generator", "star"}, {"c", c}, {"k", k}, {"delta", delta}};
    inst[axis] = v;
    const auto out = run_json({{"scenario", "cseek"},
                               {"instance", inst},
                               {"protocol", {{"a1", 16}, {"a2", 16}}},
                               {"trials", 50},
                               {"master_seed", 303}});
    std::vector<std::int64_t> slots;
    for (const auto& r : out.trials) slots.push_back(r.slots.value_or(INT64_MAX));
    const auto med = median_of(slots);
    detail += axis + "=" + std::to_string(v) + ":" +
              (med == INT64_MAX ? std::string("inf") : std::to_string(med)) + " ";
    if (med == INT64_MAX) return std::nullopt;
    xs.push_back(v);
    ys.push_back(static_cast<double>(med));
  }
  return loglog_slope(xs, ys);
}

void cseek_scaling() {
  Timer t;
  std::string da;
  std::string db;
  const auto sa = star_slope("c", {4, 8, 16, 32}, 4, 1, 4, da);
  const auto sb = star_slope("delta", {4, 8, 16, 32}, 4, 2, 4, db);
  const bool ok_a = sa && *sa >= 1.6 && *sa <= 2.4;
  const bool ok_b = sb && *sb >= 0.7 && *sb <= 1.3;
  report(3, "cseek scaling slopes c in [1.6, 2.4], delta in [0.7, 1.3]", ok_a && ok_b,
         "c slope " + (sa ? fmt(*sa) : std::string("none")) + ", delta slope " +
             (sb ? fmt(*sb) : std::string("none")) + " | " + da + "| " + db,
         t.seconds());
}

void ckseek_filter() {
  Timer t;
  std::vector<int> overlaps(5, 4);
  overlaps.resize(25, 1);
  const json inst = {{"generator", "star_profile"}, {"c", 8}, {"k", 1}, {"overlaps", overlaps}};
  const auto filt = run_json({{"scenario", "ckseek"},
                              {"instance", inst},
                              {"protocol", {{"k_hat", 4}, {"delta_khat", 5}}},
                              {"trials", 100},
                              {"master_seed", 404}});
  const auto full = run_json(
      {{"scenario", "cseek"}, {"instance", inst}, {"trials", 100}, {"master_seed", 404}});
  int good = 0;
  std::vector<std::int64_t> fb;
  std::vector<std::int64_t> cb;
  for (const auto& r : filt.trials) {
    good += r.metrics.at("missing_pairs") == 0 && r.metrics.at("false_pairs") == 0;
    fb.push_back(r.budget);
  }
  bool same = true;
  for (std::size_t i = 0; i < full.trials.size(); ++i) {
    cb.push_back(full.trials[i].budget);
    same = same && full.trials[i].seed == filt.trials[i].seed;
  }
  const auto mf = median_of(fb);
  const auto mc = median_of(cb);
  const bool ok = same && good >= 95 && mf < mc;
  report(4, "ckseek finds good neighbors >= 95%, fewer slots than cseek", ok,
         "good " + std::to_string(good) + "/100, median slots ckseek " + std::to_string(mf) +
             " vs cseek " + std::to_string(mc),
         t.seconds());
}

void edge_coloring() {
  Timer t;
  CgcastConfig cfg;
  int colored = 0;
  int proper = 0;
  int within = 0;
  int phase_cap = 0;
  for (int i = 0; i < 100; ++i) {
    const auto seed = trial_seed(505, i);
    const auto net = gen_random(32, 8, 4, 2, 4, 0.12, mix64(seed ^ 0x5eed));
    const auto res = cgcast(net, 0, Data{{1}}, cfg, seed);
    phase_cap = static_cast<int>(std::ceil(4.0 * std::log(32.0)));
    const bool all_edges = res.edge_colors.size() == edge_count(net);
    if (!res.colored || !all_edges) continue;
    ++colored;
    proper += proper_edge_coloring(net, res.edge_colors, degree_of(net.adjacency));
    within += res.phases_used <= phase_cap;
  }
  const bool ok = proper == colored && within >= 95;
  report(5, "edge coloring proper on every success, done within ceil(4 ln n) phases >= 95%", ok,
         "colored " + std::to_string(colored) + "/100, proper " + std::to_string(proper) + "/" +
             std::to_string(colored) + ", within " + std::to_string(phase_cap) + " phases " +
             std::to_string(within) + "/100",
         t.seconds());
}

// Siblings in a rooted tree share no global channel.
bool siblings_disjoint(const NetworkInstance& net) {
  const auto depth = bfs_dist(net.adjacency, 0);
  for (NodeId p = 0; p < net.node_count(); ++p) {
    std::set<ChannelId> seen;
    for (NodeId ch : net.adjacency[p]) {
      if (depth[ch] != depth[p] + 1) continue;
      for (auto g : net.channel_sets[ch]) {
        if (!seen.insert(g).second) return false;
      }
    }
  }
  return true;
}

void cgcast_and_tree_floor() {
  Timer t;
  int random_ok = 0;
  int tree_ok = 0;
  int arith_ok = 0;
  int arith_total = 0;
  bool disjoint = true;
  std::optional<Slot> tree_min;

  CgcastConfig rcfg;
  for (int i = 0; i < 100; ++i) {
    const auto seed = trial_seed(606, i);
    const auto net = gen_random(16, 8, 4, 2, 4, 0.3, mix64(seed ^ 0x5eed));
    const auto res = cgcast(net, 0, Data{{1}}, rcfg, seed);
    random_ok += res.all_informed;
    const int D = diameter_of(net.adjacency);
    const int delta = degree_of(net.adjacency);
    const int R = static_cast<int>(std::ceil(2.0 * std::log(16.0)));
    ++arith_total;
    arith_ok += res.dissemination_slots ==
                static_cast<Slot>(D) * 2 * delta * R * std::max(1, ceil_lg(delta));
  }

  CgcastConfig tcfg;
  tcfg.seek.a1 = tcfg.seek.a2 = 8;
  for (int i = 0; i < 100; ++i) {
    const auto seed = trial_seed(607, i);
    const auto net = gen_complete_tree(3, 3, 3, mix64(seed ^ 0x5eed));
    disjoint = disjoint && siblings_disjoint(net);
    const auto res = cgcast(net, 0, Data{{1}}, tcfg, seed);
    tree_ok += res.all_informed;
    const int D = diameter_of(net.adjacency);
    const int delta = degree_of(net.adjacency);
    const int R = static_cast<int>(std::ceil(2.0 * std::log(static_cast<double>(net.node_count()))));
    ++arith_total;
    arith_ok += res.dissemination_slots ==
                static_cast<Slot>(D) * 2 * delta * R * std::max(1, ceil_lg(delta));
    if (res.dissemination_all_informed) {
      tree_min = tree_min ? std::min(*tree_min, *res.dissemination_all_informed)
                          : *res.dissemination_all_informed;
    }
  }
  const double secs = t.seconds();
  const bool ok6 = random_ok >= 95 && tree_ok >= 95 && arith_ok == arith_total;
  report(6, "cgcast informs all >= 95%, dissemination slots = D*2*delta*R*ceil(lg delta)", ok6,
         "random " + std::to_string(random_ok) + "/100, tree " + std::to_string(tree_ok) +
             "/100, slot arithmetic " + std::to_string(arith_ok) + "/" + std::to_string(arith_total),
         secs);
  const Slot floor = 3 * (std::min(3, 3) - 1);
  const bool ok7 = disjoint && tree_min && *tree_min >= floor;
  report(7, "depth-3 tree all-informed time >= 3*(min(c, delta)-1)", ok7,
         "min " + (tree_min ? std::to_string(*tree_min) : std::string("none")) + " vs floor " +
             std::to_string(floor) + (disjoint ? ", siblings disjoint" : ", siblings overlap"),
         0.0);
}

void hitting_games() {
  Timer t;
  // (a) uniform player against Geometric(1/1024).
  const auto a = run_json({{"scenario", "game-bipartite"},
                           {"game", {{"c", 32}, {"k", 1}, {"player", "uniform"}, {"max_rounds", 1000000}}},
                           {"trials", 10000},
                           {"master_seed", 808}});
  std::vector<std::int64_t> rounds;
  int early = 0;
  for (const auto& g : a.games) {
    rounds.push_back(g.won ? g.rounds : INT64_MAX);
    early += g.won && g.rounds <= 128;
  }
  std::sort(rounds.begin(), rounds.end());
  const double p = 1.0 / 1024.0;
  const double n = static_cast<double>(rounds.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    if (rounds[i] == INT64_MAX) {
      ks = std::max(ks, std::abs(i / n - 1.0));
      break;
    }
    const double F = 1.0 - std::pow(1.0 - p, static_cast<double>(rounds[i]));
    const double Fprev = 1.0 - std::pow(1.0 - p, static_cast<double>(rounds[i] - 1));
    ks = std::max({ks, std::abs((i + 1) / n - F), std::abs(i / n - Fprev)});
  }
  const double p128 = rate(early, 10000);
  const bool ok_a = ks < 0.02 && p128 <= 0.5;

  // (b) complete game at c=16, every built-in player.
  bool ok_b = true;
  std::string db;
  for (const std::string player : {"uniform", "fresh-pair", "reduction"}) {
    const auto b = run_json({{"scenario", "game-complete"},
                             {"game", {{"c", 16}, {"player", player}, {"max_rounds", 5}}},
                             {"trials", 10000},
                             {"master_seed", 809}});
    int wins = 0;
    for (const auto& g : b.games) wins += g.won && g.rounds <= 5;
    ok_b = ok_b && rate(wins, 10000) <= 0.5;
    db += player + ":" + fmt(rate(wins, 10000)) + " ";
  }

  // (c) reduction player against the simulated pair's first meeting.
  SeekConfig scfg;
  int agree = 0;
  for (int i = 0; i < 100; ++i) {
    const auto seed = trial_seed(810, i);
    const auto net = gen_two_node(8, 2, mix64(seed ^ 0x5eed));
    const auto meet = first_meeting_slot(net, scfg, seed);
    auto game = game_from_two_node(net);
    auto player = make_reduction_player(8, 2, scfg, seed);
    const auto r = referee_play(game, *player, std::int64_t{1} << 40, derive_stream(seed, 0, 1));
    agree += meet ? (r.won && r.rounds == *meet + 1) : !r.won;
  }
  const bool ok_c = agree == 100;
  report(8, "hitting games: uniform ~ Geometric(1/1024), complete c=16 slow, reduction tracks seek",
         ok_a && ok_b && ok_c,
         "KS " + fmt(ks) + ", P[win<=128] " + fmt(p128) + " | " + db + "| reduction agrees " +
             std::to_string(agree) + "/100",
         t.seconds());
}

void reproducibility() {
  Timer t;
  const std::vector<json> configs = {
      {{"scenario", "count"}, {"count", {{"m", 8}}}, {"trials", 20}},
      {{"scenario", "cseek"},
       {"instance", {{"generator", "random"}, {"n", 12}, {"pool", 8}, {"c", 4}, {"k", 2}}},
       {"trials", 8}},
      {{"scenario", "ckseek"},
       {"instance", {{"generator", "star_profile"}, {"c", 6}, {"overlaps", {3, 3, 1, 1}}}},
       {"protocol", {{"k_hat", 3}}},
       {"trials", 8}},
      {{"scenario", "cgcast"},
       {"instance", {{"generator", "random"}, {"n", 10}, {"pool", 8}, {"c", 4}, {"k", 2}}},
       {"trials", 4}},
      {{"scenario", "game-bipartite"}, {"game", {{"c", 8}}}, {"trials", 50}},
      {{"scenario", "game-complete"}, {"game", {{"c", 8}, {"player", "fresh-pair"}}}, {"trials", 50}},
      {{"scenario", "game-reduction"}, {"game", {{"c", 6}, {"k", 2}}}, {"trials", 20}},
  };
  int same = 0;
  for (auto j : configs) {
    j["master_seed"] = 909;
    const auto first = csv_of(run_json(j));
    const auto again = csv_of(run_json(j));
    j["threads"] = 4;
    const auto parallel = csv_of(run_json(j));
    same += first == again && first == parallel;
  }
  const bool ok = same == static_cast<int>(configs.size());
  report(9, "byte-identical CSV on rerun and across thread counts", ok,
         std::to_string(same) + "/" + std::to_string(configs.size()) + " scenarios", t.seconds());
}

}  // namespace

int main() {
  try {
    count_accuracy();
    cseek_completeness();
    cseek_scaling();
    ckseek_filter();
    edge_coloring();
    cgcast_and_tree_floor();
    hitting_games();
    reproducibility();
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
