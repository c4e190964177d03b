#include "crn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "crn/topology.hpp"

namespace crn {

namespace {

using nlohmann::json;

constexpr std::uint64_t kInstanceSalt = 0x1157;
constexpr std::uint64_t kTagReferee = 0x650;

const std::pair<Scenario, const char*> kScenarioNames[] = {
    {Scenario::kCount, "count"},
    {Scenario::kCseek, "cseek"},
    {Scenario::kCkseek, "ckseek"},
    {Scenario::kCgcast, "cgcast"},
    {Scenario::kGameBipartite, "game-bipartite"},
    {Scenario::kGameComplete, "game-complete"},
    {Scenario::kGameReduction, "game-reduction"},
};

[[noreturn]] void config_fault(const std::string& what) { throw ConfigurationFault(what); }

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) config_fault(where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) ==
        allowed.end()) {
      config_fault("unknown key '" + key + "' in " + where);
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    config_fault(where + "." + key + " has the wrong type");
  }
}

template <class T>
void read_opt(const json& j, const char* key, std::optional<T>& out, const std::string& where) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
    return;
  }
  T v{};
  read(j, key, v, where);
  out = v;
}

template <class T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

NetworkInstance build_instance(const InstanceSpec& s, std::uint64_t seed) {
  const std::uint64_t use = s.seed ? *s.seed : seed;
  if (s.generator == "two_node") return gen_two_node(s.c, s.k, use);
  if (s.generator == "star") return gen_star(s.delta, s.c, s.k, use, s.k_max, s.pool);
  if (s.generator == "star_profile") return gen_star_profile(s.overlaps, s.c, use, s.pool);
  if (s.generator == "tree") return gen_complete_tree(s.depth, s.c, s.delta, use, s.k);
  if (s.generator == "random") {
    return gen_random(s.n, s.pool > 0 ? s.pool : 3 * s.c, s.c, s.k, s.k_max > 0 ? s.k_max : s.c,
                      s.density, use);
  }
  if (s.generator == "file") return load_instance(s.path);
  config_fault("unknown instance generator '" + s.generator + "'");
}

void fill_params(TrialRecord& r, const NetworkParams& p) {
  r.n = p.n;
  r.c = p.c;
  r.k = p.k;
  r.k_max = p.k_max;
  r.delta = p.delta_max;
  r.diam = p.diam;
}

bool over_cap(const ExperimentConfig& cfg, std::int64_t budget) {
  return cfg.slot_budget_cap && budget > *cfg.slot_budget_cap;
}

TrialRecord count_trial(const ExperimentConfig& cfg, std::int64_t i, std::uint64_t seed) {
  TrialRecord r;
  r.trial = i;
  r.seed = seed;
  const auto cc = cfg.count_config();
  const int m = cfg.count.m;
  fill_params(r, make_count_instance(m).params);
  r.budget = cc.total_slots();
  r.metrics = {{"m", m}, {"estimate", -1}, {"triggered_round", -1}};
  if (over_cap(cfg, r.budget)) return r;
  const auto res = run_count(m, cc, seed);
  r.metrics["estimate"] = res.estimate;
  r.metrics["triggered_round"] = res.triggered_round ? *res.triggered_round : -1;
  r.success = res.estimate >= m && res.estimate <= 4 * static_cast<std::int64_t>(m);
  if (r.success) r.slots = r.budget;
  return r;
}

TrialRecord seek_trial(const ExperimentConfig& cfg, const NetworkInstance& net, std::int64_t i,
                       std::uint64_t seed) {
  TrialRecord r;
  r.trial = i;
  r.seed = seed;
  fill_params(r, net.params);
  const auto scfg = cfg.seek_config();
  const int min_overlap = scfg.mode == SeekMode::kFilter ? scfg.k_hat : 1;
  r.budget = seek_budget(net.params, scfg).total_slots();

  std::int64_t required = 0;
  for (NodeId u = 0; u < net.node_count(); ++u) {
    required += static_cast<std::int64_t>(neighbors_with_overlap(net, u, min_overlap).size());
  }
  r.metrics = {{"required_pairs", required}, {"missing_pairs", required}, {"false_pairs", 0}};
  if (over_cap(cfg, r.budget)) return r;

  SeekStop stop;
  if (cfg.protocol.early_stop) {
    stop = [&net, required, min_overlap, last = std::int64_t{-1}](
               Slot, const std::vector<SeekMachine>& ms) mutable {
      std::int64_t total = 0;
      for (const auto& m : ms) total += static_cast<std::int64_t>(m.state().ids.size());
      if (total == last || total < required) {
        last = total;
        return false;
      }
      last = total;
      return discovery_complete(net, ms, min_overlap);
    };
  }
  const auto run = run_seek(net, scfg, seed, 0, nullptr, stop);

  std::int64_t missing = 0;
  std::int64_t false_pairs = 0;
  for (const auto& m : run.machines) {
    for (NodeId v : neighbors_with_overlap(net, m.id(), min_overlap)) {
      if (!m.state().ids.contains(v)) ++missing;
    }
    for (NodeId v : m.state().ids) {
      if (!net.adjacent(m.id(), v)) ++false_pairs;
    }
  }
  r.metrics["missing_pairs"] = missing;
  r.metrics["false_pairs"] = false_pairs;
  r.success = missing == 0 && false_pairs == 0;
  if (r.success) r.slots = slots_to_discovery(net, run.machines, min_overlap);
  return r;
}

TrialRecord cgcast_trial(const ExperimentConfig& cfg, const NetworkInstance& net, std::int64_t i,
                         std::uint64_t seed) {
  TrialRecord r;
  r.trial = i;
  r.seed = seed;
  fill_params(r, net.params);
  const auto res = cgcast(net, cfg.protocol.source, Data{{0x43, 0x47}}, cfg.cgcast_config(), seed);
  r.budget = res.total_slots;
  std::int64_t informed = 0;
  Slot last = 0;
  for (const auto& t : res.informed_at) {
    if (!t) continue;
    ++informed;
    last = std::max(last, *t + 1);
  }
  r.metrics = {
      {"colored", res.colored ? 1 : 0},
      {"proper", res.proper ? 1 : 0},
      {"phases_used", res.phases_used},
      {"phase_budget", res.phase_budget},
      {"flagged_edges", static_cast<std::int64_t>(res.flagged_edges.size())},
      {"informed_nodes", informed},
      {"dissemination_slots", res.dissemination_slots},
      {"dissemination_all_informed", res.dissemination_all_informed.value_or(-1)},
  };
  if (over_cap(cfg, r.budget)) return r;
  r.success = res.all_informed;
  if (r.success) r.slots = last;
  return r;
}

std::unique_ptr<PlayerStrategy> make_player(const ExperimentConfig& cfg, int c, int k,
                                            std::uint64_t seed) {
  const auto& name = cfg.game.player;
  if (name == "uniform") return make_uniform_player();
  if (name == "fresh-pair") return make_fresh_pair_player();
  if (name == "reduction") return make_reduction_player(c, k, cfg.seek_config(), seed);
  config_fault("unknown player '" + name + "'");
}

GameRecord game_trial(const ExperimentConfig& cfg, std::int64_t i, std::uint64_t seed) {
  GameRecord r;
  r.trial = i;
  const int c = cfg.game.c;
  const int k = cfg.scenario == Scenario::kGameComplete ? c : cfg.game.k;
  const std::uint64_t inst_seed = cfg.instance.seed ? *cfg.instance.seed : mix64(seed ^ kInstanceSalt);
  std::optional<GameInstance> game;
  if (cfg.scenario == Scenario::kGameReduction) {
    game = game_from_two_node(gen_two_node(c, k, inst_seed));
    r.game = "reduction";
  } else {
    game = make_game(c, k, inst_seed);
    r.game = cfg.scenario == Scenario::kGameComplete ? "complete" : "bipartite";
  }
  r.c = game->c();
  r.k = game->k();
  auto player = make_player(cfg, c, k, seed);
  r.player = player->name();
  const auto res = referee_play(*game, *player, cfg.game.max_rounds, derive_stream(seed, 0, kTagReferee));
  r.rounds = res.rounds;
  r.won = res.won;
  return r;
}

/// Runs f(i) for i in [0, trials) on `threads` workers; results land by index.
template <class R, class F>
std::vector<R> parallel_trials(int trials, int threads, F&& f) {
  std::vector<R> out(trials);
  std::vector<std::exception_ptr> errors(trials);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < trials; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min(threads, trials));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

SummaryStats summarize_slots(std::vector<std::optional<std::int64_t>> v) {
  SummaryStats s;
  s.trials = static_cast<std::int64_t>(v.size());
  if (v.empty()) return s;
  // nullopt sorts last: failures behave as +infinity.
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (!a) return false;
    if (!b) return true;
    return *a < *b;
  });
  s.successes = std::count_if(v.begin(), v.end(), [](const auto& x) { return x.has_value(); });
  s.success_rate = static_cast<double>(s.successes) / static_cast<double>(s.trials);
  const double n = static_cast<double>(v.size());
  auto q = [&](double p) {
    auto idx = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
    idx = std::clamp<std::size_t>(idx, 1, v.size());
    return v[idx - 1];
  };
  s.median = q(0.5);
  s.p10 = q(0.1);
  s.p90 = q(0.9);
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::int64_t parse_int(const std::string& s, int line, const std::string& column) {
  try {
    std::size_t pos = 0;
    const auto v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseFault("line " + std::to_string(line) + ": column '" + column + "' is not an integer: '" +
                     s + "'");
  }
}

json read_config_line(std::istream& is, int& line_no) {
  std::string line;
  if (!std::getline(is, line)) throw ParseFault("line 1: empty input");
  ++line_no;
  static const std::string prefix = "# config: ";
  if (line.rfind(prefix, 0) != 0) throw ParseFault("line 1: expected '# config: ' line");
  try {
    return json::parse(line.substr(prefix.size()));
  } catch (const json::exception& e) {
    throw ParseFault(std::string("line 1: bad config JSON: ") + e.what());
  }
}

}  // namespace

std::string to_string(Scenario s) {
  for (const auto& [v, name] : kScenarioNames) {
    if (v == s) return name;
  }
  return "unknown";
}

Scenario scenario_from_string(const std::string& name) {
  for (const auto& [v, n] : kScenarioNames) {
    if (name == n) return v;
  }
  config_fault("unknown scenario '" + name + "'");
}

bool is_game(Scenario s) {
  return s == Scenario::kGameBipartite || s == Scenario::kGameComplete ||
         s == Scenario::kGameReduction;
}

void ExperimentConfig::validate() const {
  if (trials < 1) config_fault("trials must be >= 1");
  if (threads < 1) config_fault("threads must be >= 1");
  if (format != "csv" && format != "json") config_fault("format must be csv or json");
  const auto& p = protocol;
  if (p.a1 <= 0 || p.a2 <= 0 || p.phase_mult <= 0 || p.count_delta <= 0 || p.count_round_mult <= 0) {
    config_fault("all protocol multipliers must be > 0");
  }
  if (p.log_base <= 1.0) config_fault("protocol.log_base must be > 1");
  if (p.rounds_per_step && *p.rounds_per_step < 1) config_fault("protocol.rounds_per_step must be >= 1");
  if (slot_budget_cap && *slot_budget_cap < 1) config_fault("slot_budget_cap must be >= 1");
  if (min_success_rate && (*min_success_rate < 0.0 || *min_success_rate > 1.0)) {
    config_fault("min_success_rate must lie in [0, 1]");
  }
  switch (scenario) {
    case Scenario::kCount:
      if (count.m < 1) config_fault("count.m must be >= 1");
      if (count.n < 2 || count.delta < 1) config_fault("count.n must be >= 2 and count.delta >= 1");
      if (count.m > count.delta) config_fault("count.m must not exceed count.delta");
      break;
    case Scenario::kCkseek:
      if (p.k_hat < 1) config_fault("ckseek needs protocol.k_hat >= 1");
      [[fallthrough]];
    case Scenario::kCseek:
    case Scenario::kCgcast:
      break;
    case Scenario::kGameBipartite:
    case Scenario::kGameComplete:
    case Scenario::kGameReduction:
      if (game.c < 1 || game.k < 1 || game.k > game.c) config_fault("game needs 1 <= k <= c");
      if (game.max_rounds < 1) config_fault("game.max_rounds must be >= 1");
      if (game.player != "uniform" && game.player != "fresh-pair" && game.player != "reduction") {
        config_fault("unknown player '" + game.player + "'");
      }
      if (scenario == Scenario::kGameReduction && game.player != "reduction") {
        config_fault("game-reduction needs game.player = reduction");
      }
      break;
  }
}

SeekConfig ExperimentConfig::seek_config() const {
  SeekConfig s;
  s.mode = scenario == Scenario::kCkseek ? SeekMode::kFilter : SeekMode::kFull;
  s.k_hat = protocol.k_hat;
  s.delta_khat = protocol.delta_khat;
  s.a1 = protocol.a1;
  s.a2 = protocol.a2;
  s.log_base = protocol.log_base;
  s.count_delta = protocol.count_delta;
  s.count_round_mult = protocol.count_round_mult;
  return s;
}

CgcastConfig ExperimentConfig::cgcast_config() const {
  CgcastConfig c;
  c.seek = seek_config();
  c.seek.mode = SeekMode::kFull;
  c.phase_mult = protocol.phase_mult;
  c.rounds_per_step = protocol.rounds_per_step;
  return c;
}

CountConfig ExperimentConfig::count_config() const {
  return CountConfig::make(count.n, count.delta, protocol.count_delta, protocol.count_round_mult);
}

ExperimentConfig config_from_json(const json& j) {
  check_keys(j, "config",
             {"scenario", "instance", "protocol", "count", "game", "trials", "master_seed",
              "slot_budget_cap", "output", "format", "threads", "min_success_rate"});
  ExperimentConfig c;
  if (!j.contains("scenario")) config_fault("config.scenario is required");
  std::string scenario;
  read(j, "scenario", scenario, "config");
  c.scenario = scenario_from_string(scenario);
  if (j.contains("instance")) {
    const auto& i = j.at("instance");
    check_keys(i, "instance",
               {"generator", "n", "pool", "c", "k", "k_max", "delta", "depth", "density", "overlaps",
                "path", "seed"});
    auto& s = c.instance;
    read(i, "generator", s.generator, "instance");
    read(i, "n", s.n, "instance");
    read(i, "pool", s.pool, "instance");
    read(i, "c", s.c, "instance");
    read(i, "k", s.k, "instance");
    read(i, "k_max", s.k_max, "instance");
    read(i, "delta", s.delta, "instance");
    read(i, "depth", s.depth, "instance");
    read(i, "density", s.density, "instance");
    read(i, "overlaps", s.overlaps, "instance");
    read(i, "path", s.path, "instance");
    read_opt(i, "seed", s.seed, "instance");
  }
  if (j.contains("protocol")) {
    const auto& p = j.at("protocol");
    check_keys(p, "protocol",
               {"a1", "a2", "log_base", "count_delta", "count_round_mult", "k_hat", "delta_khat",
                "phase_mult", "rounds_per_step", "source", "early_stop"});
    auto& s = c.protocol;
    read(p, "a1", s.a1, "protocol");
    read(p, "a2", s.a2, "protocol");
    read(p, "log_base", s.log_base, "protocol");
    read(p, "count_delta", s.count_delta, "protocol");
    read(p, "count_round_mult", s.count_round_mult, "protocol");
    read(p, "k_hat", s.k_hat, "protocol");
    read_opt(p, "delta_khat", s.delta_khat, "protocol");
    read(p, "phase_mult", s.phase_mult, "protocol");
    read_opt(p, "rounds_per_step", s.rounds_per_step, "protocol");
    read(p, "source", s.source, "protocol");
    read(p, "early_stop", s.early_stop, "protocol");
  }
  if (j.contains("count")) {
    const auto& k = j.at("count");
    check_keys(k, "count", {"m", "n", "delta"});
    read(k, "m", c.count.m, "count");
    read(k, "n", c.count.n, "count");
    read(k, "delta", c.count.delta, "count");
  }
  if (j.contains("game")) {
    const auto& g = j.at("game");
    check_keys(g, "game", {"c", "k", "player", "max_rounds"});
    read(g, "c", c.game.c, "game");
    read(g, "k", c.game.k, "game");
    read(g, "player", c.game.player, "game");
    read(g, "max_rounds", c.game.max_rounds, "game");
  }
  if (c.scenario == Scenario::kGameReduction && !(j.contains("game") && j.at("game").contains("player"))) {
    c.game.player = "reduction";
  }
  read(j, "trials", c.trials, "config");
  read(j, "master_seed", c.master_seed, "config");
  read_opt(j, "slot_budget_cap", c.slot_budget_cap, "config");
  read(j, "output", c.output, "config");
  read(j, "format", c.format, "config");
  read(j, "threads", c.threads, "config");
  read_opt(j, "min_success_rate", c.min_success_rate, "config");
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  const auto& i = c.instance;
  const auto& p = c.protocol;
  return {
      {"scenario", to_string(c.scenario)},
      {"instance",
       {{"generator", i.generator},
        {"n", i.n},
        {"pool", i.pool},
        {"c", i.c},
        {"k", i.k},
        {"k_max", i.k_max},
        {"delta", i.delta},
        {"depth", i.depth},
        {"density", i.density},
        {"overlaps", i.overlaps},
        {"path", i.path},
        {"seed", opt_json(i.seed)}}},
      {"protocol",
       {{"a1", p.a1},
        {"a2", p.a2},
        {"log_base", p.log_base},
        {"count_delta", p.count_delta},
        {"count_round_mult", p.count_round_mult},
        {"k_hat", p.k_hat},
        {"delta_khat", opt_json(p.delta_khat)},
        {"phase_mult", p.phase_mult},
        {"rounds_per_step", opt_json(p.rounds_per_step)},
        {"source", p.source},
        {"early_stop", p.early_stop}}},
      {"count", {{"m", c.count.m}, {"n", c.count.n}, {"delta", c.count.delta}}},
      {"game",
       {{"c", c.game.c}, {"k", c.game.k}, {"player", c.game.player}, {"max_rounds", c.game.max_rounds}}},
      {"trials", c.trials},
      {"master_seed", c.master_seed},
      {"slot_budget_cap", opt_json(c.slot_budget_cap)},
      {"output", c.output},
      {"format", c.format},
      {"threads", c.threads},
      {"min_success_rate", opt_json(c.min_success_rate)},
  };
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_fault("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    config_fault("config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

json SummaryStats::to_json() const {
  return {{"trials", trials},         {"successes", successes}, {"success_rate", success_rate},
          {"median", opt_json(median)}, {"p10", opt_json(p10)},   {"p90", opt_json(p90)}};
}

SummaryStats summarize(const std::vector<TrialRecord>& records) {
  std::vector<std::optional<std::int64_t>> v;
  v.reserve(records.size());
  for (const auto& r : records) v.push_back(r.success ? r.slots : std::nullopt);
  return summarize_slots(std::move(v));
}

SummaryStats summarize(const std::vector<GameRecord>& records) {
  std::vector<std::optional<std::int64_t>> v;
  v.reserve(records.size());
  for (const auto& r : records) v.push_back(r.won ? std::optional(r.rounds) : std::nullopt);
  return summarize_slots(std::move(v));
}

std::vector<std::string> trial_metric_columns(Scenario s) {
  switch (s) {
    case Scenario::kCount:
      return {"m", "estimate", "triggered_round"};
    case Scenario::kCseek:
    case Scenario::kCkseek:
      return {"required_pairs", "missing_pairs", "false_pairs"};
    case Scenario::kCgcast:
      return {"colored",        "proper",         "phases_used",         "phase_budget",
              "flagged_edges",  "informed_nodes", "dissemination_slots", "dissemination_all_informed"};
    default:
      return {};
  }
}

RunOutput run(const ExperimentConfig& cfg) {
  cfg.validate();
  RunOutput out;
  out.config = cfg;
  const int trials = cfg.trials;

  if (is_game(cfg.scenario)) {
    // Surface parameter problems before any trial runs.
    try {
      (void)game_trial(cfg, 0, trial_seed(cfg.master_seed, 0));
    } catch (const ParameterFault& e) {
      config_fault(e.what());
    } catch (const GenerationFault& e) {
      config_fault(e.what());
    }
    out.games = parallel_trials<GameRecord>(trials, cfg.threads, [&](int i) {
      return game_trial(cfg, i, trial_seed(cfg.master_seed, static_cast<std::uint64_t>(i)));
    });
    out.summary = summarize(out.games);
    return out;
  }

  std::optional<NetworkInstance> fixed;
  auto instance_for = [&](std::uint64_t seed) {
    if (fixed) return *fixed;
    return build_instance(cfg.instance, mix64(seed ^ kInstanceSalt));
  };
  if (cfg.scenario != Scenario::kCount) {
    try {
      if (cfg.instance.generator == "file" || cfg.instance.seed) {
        fixed = build_instance(cfg.instance, 0);
      }
      const auto probe = instance_for(trial_seed(cfg.master_seed, 0));
      if (cfg.scenario == Scenario::kCgcast) {
        if (cfg.protocol.source < 0 || cfg.protocol.source >= probe.node_count()) {
          config_fault("protocol.source is not a node of the instance");
        }
        (void)seek_budget(probe.params, cfg.cgcast_config().seek);
      } else {
        (void)seek_budget(probe.params, cfg.seek_config());
      }
    } catch (const ParameterFault& e) {
      config_fault(e.what());
    } catch (const GenerationFault& e) {
      config_fault(e.what());
    } catch (const ParseFault& e) {
      config_fault(e.what());
    }
  } else if (auto problems = cfg.count_config().problems(); !problems.empty()) {
    config_fault(problems.front());
  }

  out.trials = parallel_trials<TrialRecord>(trials, cfg.threads, [&](int i) {
    const auto seed = trial_seed(cfg.master_seed, static_cast<std::uint64_t>(i));
    switch (cfg.scenario) {
      case Scenario::kCount:
        return count_trial(cfg, i, seed);
      case Scenario::kCgcast:
        return cgcast_trial(cfg, instance_for(seed), i, seed);
      default:
        return seek_trial(cfg, instance_for(seed), i, seed);
    }
  });
  out.summary = summarize(out.trials);
  return out;
}

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  LogLogFit f;
  if (x.size() != y.size() || x.size() < 3) return f;
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0 || y[i] <= 0) return f;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
    sx += lx.back();
    sy += ly.back();
    sxx += lx.back() * lx.back();
    sxy += lx.back() * ly.back();
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return f;
  const double slope = (n * sxy - sx * sy) / den;
  const double icpt = (sy - slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (icpt + slope * lx[i]);
    ss += e * e;
  }
  f.slope = slope;
  f.intercept = icpt;
  f.residual = std::sqrt(ss / n);
  return f;
}

SweepOutput sweep(const ExperimentConfig& cfg, const std::string& axis,
                  const std::vector<double>& values) {
  static const std::vector<std::string> kAxes = {"n", "c", "k", "k_hat", "delta", "diam"};
  if (std::find(kAxes.begin(), kAxes.end(), axis) == kAxes.end()) {
    config_fault("sweep axis must be one of n, c, k, k_hat, delta, diam (got '" + axis + "')");
  }
  if (values.empty()) config_fault("sweep needs at least one value");
  SweepOutput out;
  out.axis = axis;
  std::vector<double> xs, ys;
  for (double value : values) {
    SweepPoint pt;
    pt.value = value;
    const int v = static_cast<int>(value);
    if (static_cast<double>(v) != value) config_fault("sweep values must be integers");
    auto c = cfg;
    if (axis == "n") {
      c.instance.n = v;
      c.count.n = v;
    } else if (axis == "c") {
      c.instance.c = v;
      c.game.c = v;
    } else if (axis == "k") {
      c.instance.k = v;
      c.game.k = v;
    } else if (axis == "k_hat") {
      c.protocol.k_hat = v;
    } else if (axis == "delta") {
      c.instance.delta = v;
      c.count.delta = v;
    } else if (v % 2 != 0 || c.instance.generator != "tree") {
      pt.feasible = false;
      pt.note = "diam sweeps need the tree generator and even values";
    } else {
      c.instance.depth = v / 2;
    }
    if (pt.feasible) {
      try {
        pt.summary = run(c).summary;
      } catch (const ConfigurationFault& e) {
        pt.feasible = false;
        pt.note = e.what();
      }
    }
    if (pt.feasible && pt.summary.median) {
      xs.push_back(value);
      ys.push_back(static_cast<double>(*pt.summary.median));
    }
    out.points.push_back(std::move(pt));
  }
  if (xs.size() < 3) {
    out.fit_note = "fit needs at least 3 values with a finite median";
  } else {
    const auto f = fit_loglog(xs, ys);
    out.slope = f.slope;
    out.intercept = f.intercept;
    out.residual = f.residual;
  }
  return out;
}

json SweepOutput::to_json() const {
  json pts = json::array();
  for (const auto& p : points) {
    pts.push_back({{"value", p.value}, {"feasible", p.feasible}, {"note", p.note},
                   {"summary", p.summary.to_json()}});
  }
  return {{"axis", axis},           {"points", pts},
          {"slope", opt_json(slope)}, {"intercept", opt_json(intercept)},
          {"residual", opt_json(residual)}, {"fit_note", fit_note}};
}

namespace {

// `threads` and `output` do not affect results and stay out of the echo,
// so serial and parallel runs of one config write the same bytes.
json echo_config(const ExperimentConfig& cfg) {
  auto j = config_to_json(cfg);
  j.erase("threads");
  j.erase("output");
  return j;
}

const std::vector<std::string> kTrialBase = {"scenario", "trial", "seed",    "n",     "c",     "k",
                                             "k_max",    "delta", "diam",    "success", "slots", "budget"};
const std::vector<std::string> kGameColumns = {"game", "c", "k", "player", "trial", "rounds", "won"};

}  // namespace

void write_csv(std::ostream& os, const RunOutput& out) {
  os << "# config: " << echo_config(out.config).dump() << '\n';
  if (is_game(out.config.scenario)) {
    for (std::size_t i = 0; i < kGameColumns.size(); ++i) os << (i ? "," : "") << kGameColumns[i];
    os << '\n';
    for (const auto& r : out.games) {
      os << r.game << ',' << r.c << ',' << r.k << ',' << r.player << ',' << r.trial << ',' << r.rounds
         << ',' << (r.won ? 1 : 0) << '\n';
    }
    return;
  }
  const auto metrics = trial_metric_columns(out.config.scenario);
  for (std::size_t i = 0; i < kTrialBase.size(); ++i) os << (i ? "," : "") << kTrialBase[i];
  for (const auto& m : metrics) os << ',' << m;
  os << '\n';
  const auto scenario = to_string(out.config.scenario);
  for (const auto& r : out.trials) {
    os << scenario << ',' << r.trial << ',' << r.seed << ',' << r.n << ',' << r.c << ',' << r.k << ','
       << r.k_max << ',' << r.delta << ',' << r.diam << ',' << (r.success ? 1 : 0) << ',';
    if (r.slots) os << *r.slots;
    os << ',' << r.budget;
    for (const auto& m : metrics) {
      auto it = r.metrics.find(m);
      os << ',' << (it == r.metrics.end() ? 0 : it->second);
    }
    os << '\n';
  }
}

json to_json(const RunOutput& out) {
  json records = json::array();
  if (is_game(out.config.scenario)) {
    for (const auto& r : out.games) {
      records.push_back({{"game", r.game}, {"c", r.c}, {"k", r.k}, {"player", r.player},
                         {"trial", r.trial}, {"rounds", r.rounds}, {"won", r.won}});
    }
  } else {
    for (const auto& r : out.trials) {
      json j = {{"trial", r.trial}, {"seed", r.seed},       {"n", r.n},
                {"c", r.c},         {"k", r.k},             {"k_max", r.k_max},
                {"delta", r.delta}, {"diam", r.diam},       {"success", r.success},
                {"slots", opt_json(r.slots)}, {"budget", r.budget}};
      for (const auto& [k, v] : r.metrics) j[k] = v;
      records.push_back(std::move(j));
    }
  }
  return {{"config", echo_config(out.config)}, {"records", records}, {"summary", out.summary.to_json()}};
}

void emit(const RunOutput& out, const std::string& format, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  if (format == "csv") {
    write_csv(os, out);
  } else if (format == "json") {
    os << to_json(out).dump(2) << '\n';
  } else {
    throw ConfigurationFault("format must be csv or json");
  }
  os.flush();
  if (!os) throw Error("write to '" + path + "' failed");
}

ParsedTrials parse_trial_csv(std::istream& is) {
  ParsedTrials out;
  int line_no = 0;
  out.config = read_config_line(is, line_no);
  std::string line;
  if (!std::getline(is, line)) throw ParseFault("line 2: missing header");
  ++line_no;
  const auto header = split_csv(line);
  if (header.size() < kTrialBase.size() ||
      !std::equal(kTrialBase.begin(), kTrialBase.end(), header.begin())) {
    throw ParseFault("line 2: unexpected header");
  }
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != header.size()) {
      throw ParseFault("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(f.size()));
    }
    TrialRecord r;
    auto num = [&](std::size_t i) { return parse_int(f[i], line_no, header[i]); };
    r.trial = num(1);
    try {
      r.seed = std::stoull(f[2]);
    } catch (const std::exception&) {
      throw ParseFault("line " + std::to_string(line_no) + ": column 'seed' is not an integer");
    }
    r.n = static_cast<int>(num(3));
    r.c = static_cast<int>(num(4));
    r.k = static_cast<int>(num(5));
    r.k_max = static_cast<int>(num(6));
    r.delta = static_cast<int>(num(7));
    r.diam = static_cast<int>(num(8));
    r.success = num(9) != 0;
    if (!f[10].empty()) r.slots = num(10);
    r.budget = num(11);
    for (std::size_t i = kTrialBase.size(); i < header.size(); ++i) r.metrics[header[i]] = num(i);
    out.records.push_back(std::move(r));
  }
  return out;
}

ParsedGames parse_game_csv(std::istream& is) {
  ParsedGames out;
  int line_no = 0;
  out.config = read_config_line(is, line_no);
  std::string line;
  if (!std::getline(is, line)) throw ParseFault("line 2: missing header");
  ++line_no;
  if (split_csv(line) != kGameColumns) throw ParseFault("line 2: unexpected header");
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != kGameColumns.size()) {
      throw ParseFault("line " + std::to_string(line_no) + ": expected 7 fields");
    }
    GameRecord r;
    r.game = f[0];
    r.c = static_cast<int>(parse_int(f[1], line_no, "c"));
    r.k = static_cast<int>(parse_int(f[2], line_no, "k"));
    r.player = f[3];
    r.trial = parse_int(f[4], line_no, "trial");
    r.rounds = parse_int(f[5], line_no, "rounds");
    r.won = parse_int(f[6], line_no, "won") != 0;
    out.records.push_back(std::move(r));
  }
  return out;
}

}  // namespace crn
