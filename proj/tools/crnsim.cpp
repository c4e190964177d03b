// Command line front end: run, sweep, game, validate.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crn/harness.hpp"
#include "crn/network.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitThreshold = 2;
constexpr double kDefaultThreshold = 0.95;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> threads;
  std::string out;
  std::string format;
  bool assert_threshold = false;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
  app->add_option("--seed", o.seed, "Master seed");
  app->add_option("--trials", o.trials, "Number of trials")->check(CLI::PositiveNumber);
  app->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("--out", o.out, "Output path (default: stdout)");
  app->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_flag("--assert", o.assert_threshold,
                "Exit 2 when the success rate is below min_success_rate (default 0.95)");
}

crn::ExperimentConfig resolve(const Overrides& o, nlohmann::json base) {
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    try {
      base = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw crn::ConfigurationFault("config '" + o.config_path + "': " + e.what());
    }
  }
  if (o.seed) base["master_seed"] = *o.seed;
  if (o.trials) base["trials"] = *o.trials;
  if (o.threads) base["threads"] = *o.threads;
  if (!o.out.empty()) base["output"] = o.out;
  if (!o.format.empty()) base["format"] = o.format;
  return crn::config_from_json(base);
}

void write(const crn::RunOutput& out, const crn::ExperimentConfig& cfg) {
  if (!cfg.output.empty()) {
    crn::emit(out, cfg.format, cfg.output);
  } else if (cfg.format == "csv") {
    crn::write_csv(std::cout, out);
  } else {
    std::cout << crn::to_json(out).dump(2) << '\n';
  }
}

int finish(const crn::RunOutput& out, const Overrides& o) {
  const auto& s = out.summary;
  std::cerr << crn::to_string(out.config.scenario) << ": " << s.successes << "/" << s.trials
            << " succeeded (rate " << s.success_rate << "), median "
            << (s.median ? std::to_string(*s.median) : "n/a") << '\n';
  if (!o.assert_threshold) return kExitOk;
  const double need = out.config.min_success_rate.value_or(kDefaultThreshold);
  if (s.success_rate < need) {
    std::cerr << "success rate " << s.success_rate << " below threshold " << need << '\n';
    return kExitThreshold;
  }
  return kExitOk;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw crn::ConfigurationFault("bad sweep value '" + item + "'");
    }
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slot-level simulator for multi-channel neighbor discovery and broadcast"};
  app.require_subcommand(1);

  Overrides run_o;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment config");
  add_common(run_cmd, run_o);
  run_cmd->get_option("--config")->required();

  Overrides sweep_o;
  std::string axis;
  std::string values;
  std::optional<double> slope_min;
  std::optional<double> slope_max;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a config over one parameter axis and fit a log-log slope");
  add_common(sweep_cmd, sweep_o);
  sweep_cmd->get_option("--config")->required();
  sweep_cmd->add_option("--axis", axis, "n, c, k, k_hat, delta or diam")->required();
  sweep_cmd->add_option("--values", values, "Comma separated values")->required();
  sweep_cmd->add_option("--slope-min", slope_min, "With --assert: lowest acceptable slope");
  sweep_cmd->add_option("--slope-max", slope_max, "With --assert: highest acceptable slope");

  Overrides game_o;
  std::string game_kind = "bipartite";
  std::optional<int> game_c;
  std::optional<int> game_k;
  std::optional<std::string> player;
  std::optional<std::int64_t> max_rounds;
  auto* game_cmd = app.add_subcommand("game", "Play hitting games");
  add_common(game_cmd, game_o);
  game_cmd->add_option("--game", game_kind, "bipartite, complete or reduction")
      ->check(CLI::IsMember({"bipartite", "complete", "reduction"}));
  game_cmd->add_option("--c", game_c, "Side size");
  game_cmd->add_option("--k", game_k, "Matching size");
  game_cmd->add_option("--player", player, "uniform, fresh-pair or reduction");
  game_cmd->add_option("--max-rounds", max_rounds, "Round cap per game");

  std::string validate_config;
  std::string validate_instance;
  auto* validate_cmd = app.add_subcommand("validate", "Check a config or an instance file");
  validate_cmd->add_option("--config", validate_config, "Experiment config (JSON)");
  validate_cmd->add_option("--instance", validate_instance, "Instance file (JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help is a ParseError with exit code 0; anything else is a usage fault.
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) {
      const auto cfg = resolve(run_o, nlohmann::json::object());
      const auto out = crn::run(cfg);
      write(out, cfg);
      return finish(out, run_o);
    }
    if (*sweep_cmd) {
      const auto cfg = resolve(sweep_o, nlohmann::json::object());
      const auto res = crn::sweep(cfg, axis, parse_values(values));
      const auto text = res.to_json().dump(2);
      if (!cfg.output.empty()) {
        std::ofstream os(cfg.output);
        if (!os) throw crn::Error("cannot open '" + cfg.output + "' for writing");
        os << text << '\n';
      } else {
        std::cout << text << '\n';
      }
      if (res.slope) {
        std::cerr << "slope " << *res.slope << " (rms residual " << *res.residual << ")\n";
      } else {
        std::cerr << "no slope: " << res.fit_note << '\n';
      }
      if (!sweep_o.assert_threshold) return kExitOk;
      const double need = cfg.min_success_rate.value_or(kDefaultThreshold);
      bool ok = true;
      for (const auto& p : res.points) ok = ok && p.feasible && p.summary.success_rate >= need;
      if ((slope_min || slope_max) && !res.slope) ok = false;
      if (res.slope && slope_min && *res.slope < *slope_min) ok = false;
      if (res.slope && slope_max && *res.slope > *slope_max) ok = false;
      return ok ? kExitOk : kExitThreshold;
    }
    if (*game_cmd) {
      nlohmann::json base = {{"scenario", "game-" + game_kind}};
      if (game_kind == "reduction") base["game"] = {{"player", "reduction"}};
      auto cfg_json = game_o.config_path.empty() ? base : nlohmann::json::object();
      if (!game_o.config_path.empty()) {
        std::ifstream in(game_o.config_path);
        try {
          cfg_json = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
          throw crn::ConfigurationFault("config '" + game_o.config_path + "': " + e.what());
        }
      }
      if (game_c) cfg_json["game"]["c"] = *game_c;
      if (game_k) cfg_json["game"]["k"] = *game_k;
      if (player) cfg_json["game"]["player"] = *player;
      if (max_rounds) cfg_json["game"]["max_rounds"] = *max_rounds;
      auto o = game_o;
      o.config_path.clear();
      const auto cfg = resolve(o, cfg_json);
      if (!crn::is_game(cfg.scenario)) throw crn::ConfigurationFault("game needs a game-* scenario");
      const auto out = crn::run(cfg);
      write(out, cfg);
      return finish(out, game_o);
    }
    if (*validate_cmd) {
      if (validate_config.empty() && validate_instance.empty()) {
        throw crn::ConfigurationFault("validate needs --config or --instance");
      }
      int status = kExitOk;
      if (!validate_config.empty()) {
        const auto cfg = crn::load_config(validate_config);
        std::cout << crn::config_to_json(cfg).dump(2) << '\n';
      }
      if (!validate_instance.empty()) {
        const auto net = crn::load_instance(validate_instance);
        const auto problems = crn::validate_instance(net);
        for (const auto& p : problems) std::cout << "violation: " << p << '\n';
        if (problems.empty()) {
          std::cout << "ok: n=" << net.params.n << " c=" << net.params.c << " k=" << net.params.k
                    << " k_max=" << net.params.k_max << " delta=" << net.params.delta_max
                    << " diam=" << net.params.diam << '\n';
        } else {
          status = kExitConfig;
        }
      }
      return status;
    }
  } catch (const crn::ConfigurationFault& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const crn::ParameterFault& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const crn::GenerationFault& e) {
    std::cerr << "generation error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const crn::ParseFault& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const crn::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
