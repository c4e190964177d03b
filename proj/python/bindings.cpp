// Python bindings for the simulator core.

#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "crn/cgcast.hpp"
#include "crn/count.hpp"
#include "crn/games.hpp"
#include "crn/harness.hpp"
#include "crn/network.hpp"
#include "crn/seek.hpp"
#include "crn/topology.hpp"

namespace py = pybind11;
using namespace crn;

namespace {

std::string seek_summary(const NetworkInstance& net, const RunResult<SeekMachine>& run, int min_overlap) {
  nlohmann::json ids = nlohmann::json::array();
  for (const auto& m : run.machines) ids.push_back(std::vector<NodeId>(m.state().ids.begin(), m.state().ids.end()));
  const auto slots = slots_to_discovery(net, run.machines, min_overlap);
  nlohmann::json j = {
      {"complete", discovery_complete(net, run.machines, min_overlap)},
      {"sound", discovery_sound(net, run.machines)},
      {"slots_to_discovery", slots ? nlohmann::json(*slots) : nlohmann::json(nullptr)},
      {"budget", run.machines.empty() ? 0 : run.machines.front().budget().total_slots()},
      {"ids", ids},
  };
  return j.dump();
}

SeekConfig seek_config(double a1, double a2, double log_base) {
  SeekConfig cfg;
  cfg.a1 = a1;
  cfg.a2 = a2;
  cfg.log_base = log_base;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-channel neighbor discovery and broadcast simulator";

  py::register_exception<ConfigurationFault>(m, "ConfigurationFault", PyExc_ValueError);
  py::register_exception<ParameterFault>(m, "ParameterFault", PyExc_ValueError);
  py::register_exception<GenerationFault>(m, "GenerationFault", PyExc_RuntimeError);
  py::register_exception<ParseFault>(m, "ParseFault", PyExc_ValueError);
  py::register_exception<PlayerFault>(m, "PlayerFault", PyExc_RuntimeError);

  py::class_<NetworkParams>(m, "NetworkParams")
      .def_readonly("n", &NetworkParams::n)
      .def_readonly("c", &NetworkParams::c)
      .def_readonly("k", &NetworkParams::k)
      .def_readonly("k_max", &NetworkParams::k_max)
      .def_readonly("delta_max", &NetworkParams::delta_max)
      .def_readonly("diam", &NetworkParams::diam);

  py::class_<NetworkInstance>(m, "NetworkInstance")
      .def_readonly("params", &NetworkInstance::params)
      .def_readonly("adjacency", &NetworkInstance::adjacency)
      .def_readonly("channel_sets", &NetworkInstance::channel_sets)
      .def("node_count", &NetworkInstance::node_count)
      .def("edges", &NetworkInstance::edges)
      .def("overlap", &NetworkInstance::overlap)
      .def("to_json", [](const NetworkInstance& net) { return instance_to_json(net).dump(); })
      .def_static("from_json", [](const std::string& text) { return parse_instance(text); })
      .def("problems", [](const NetworkInstance& net) { return validate_instance(net); });

  m.def("two_node", &gen_two_node, py::arg("c"), py::arg("k"), py::arg("seed"));
  m.def("star", &gen_star, py::arg("delta"), py::arg("c"), py::arg("k"), py::arg("seed"),
        py::arg("k_max") = 0, py::arg("pool") = 0);
  m.def("star_profile", &gen_star_profile, py::arg("overlaps"), py::arg("c"), py::arg("seed"),
        py::arg("pool") = 0);
  m.def("complete_tree", &gen_complete_tree, py::arg("depth"), py::arg("c"), py::arg("delta"),
        py::arg("seed"), py::arg("k") = 1);
  m.def("random_instance", &gen_random, py::arg("n"), py::arg("pool"), py::arg("c"), py::arg("k"),
        py::arg("k_max"), py::arg("density"), py::arg("seed"));

  m.def(
      "count",
      [](int m_, int n, int delta, std::uint64_t seed, double count_delta, int round_mult) {
        const auto cfg = CountConfig::make(n, delta, count_delta, round_mult);
        const auto r = run_count(m_, cfg, seed);
        return py::make_tuple(r.estimate, r.triggered_round);
      },
      py::arg("m"), py::arg("n") = 64, py::arg("delta") = 32, py::arg("seed") = 1,
      py::arg("count_delta") = 0.5, py::arg("round_mult") = 8,
      "Returns (estimate, triggered_round).");

  m.def(
      "_cseek",
      [](const NetworkInstance& net, std::uint64_t seed, double a1, double a2, double log_base) {
        return seek_summary(net, cseek(net, seek_config(a1, a2, log_base), seed), 1);
      },
      py::arg("net"), py::arg("seed"), py::arg("a1") = 4.0, py::arg("a2") = 4.0, py::arg("log_base") = 2.0);

  m.def(
      "_ckseek",
      [](const NetworkInstance& net, int k_hat, std::uint64_t seed, double a1, double a2,
         std::optional<int> delta_khat) {
        auto cfg = seek_config(a1, a2, 2.0);
        cfg.mode = SeekMode::kFilter;
        cfg.k_hat = k_hat;
        cfg.delta_khat = delta_khat;
        return seek_summary(net, ckseek(net, cfg, seed), k_hat);
      },
      py::arg("net"), py::arg("k_hat"), py::arg("seed"), py::arg("a1") = 4.0, py::arg("a2") = 4.0,
      py::arg("delta_khat") = py::none());

  m.def(
      "_cgcast",
      [](const NetworkInstance& net, NodeId source, std::uint64_t seed, double a1, double a2) {
        CgcastConfig cfg;
        cfg.seek = seek_config(a1, a2, 2.0);
        const auto r = cgcast(net, source, Data{{1}}, cfg, seed);
        auto j = r.to_json();
        j["all_informed"] = r.all_informed;
        j["proper"] = r.proper;
        j["dissemination_slots"] = r.dissemination_slots;
        j["total_slots"] = r.total_slots;
        return j.dump();
      },
      py::arg("net"), py::arg("source"), py::arg("seed"), py::arg("a1") = 4.0, py::arg("a2") = 4.0);

  m.def(
      "play_game",
      [](int c, int k, const std::string& player, std::int64_t max_rounds, std::uint64_t seed) {
        auto game = make_game(c, k, seed);
        std::unique_ptr<PlayerStrategy> p;
        if (player == "uniform") {
          p = make_uniform_player();
        } else if (player == "fresh-pair") {
          p = make_fresh_pair_player();
        } else if (player == "reduction") {
          p = make_reduction_player(c, k, SeekConfig{}, seed);
        } else {
          throw ConfigurationFault("unknown player '" + player + "'");
        }
        const auto r = referee_play(game, *p, max_rounds, derive_stream(seed, 0, 1));
        return py::make_tuple(r.won, r.rounds);
      },
      py::arg("c"), py::arg("k"), py::arg("player") = "uniform", py::arg("max_rounds") = 1'000'000,
      py::arg("seed") = 1, "Returns (won, rounds).");

  m.def(
      "_run",
      [](const std::string& config_json, const std::string& format) {
        const auto out = run(config_from_json(nlohmann::json::parse(config_json)));
        if (format == "csv") {
          std::ostringstream os;
          write_csv(os, out);
          return os.str();
        }
        return to_json(out).dump();
      },
      py::arg("config_json"), py::arg("format") = "json");

  m.def(
      "_resolve_config",
      [](const std::string& config_json) {
        return config_to_json(config_from_json(nlohmann::json::parse(config_json))).dump();
      },
      py::arg("config_json"));
}
