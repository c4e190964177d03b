#include "crn/network.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

namespace crn {

std::vector<std::string> NetworkParams::problems() const {
  std::vector<std::string> out;
  if (!(1 <= k && k <= k_max && k_max <= c)) {
    out.push_back("params: need 1 <= k <= k_max <= c (k=" + std::to_string(k) +
                  ", k_max=" + std::to_string(k_max) + ", c=" + std::to_string(c) + ")");
  }
  if (!(1 <= delta_max && delta_max <= n - 1)) {
    out.push_back("params: need 1 <= delta <= n-1 (delta=" + std::to_string(delta_max) +
                  ", n=" + std::to_string(n) + ")");
  }
  if (diam < 1) out.push_back("params: need diam >= 1");
  return out;
}

bool NetworkInstance::adjacent(NodeId u, NodeId v) const {
  const auto& a = adjacency[u];
  return std::binary_search(a.begin(), a.end(), v);
}

int NetworkInstance::overlap(NodeId u, NodeId v) const {
  const auto& a = channel_sets[u];
  const auto& b = channel_sets[v];
  int shared = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++shared;
      ++i;
      ++j;
    }
  }
  return shared;
}

Label NetworkInstance::label_of(NodeId u, ChannelId g) const {
  const auto& perm = label_perms[u];
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] == g) return static_cast<Label>(i + 1);
  }
  return 0;
}

EdgeList NetworkInstance::edges() const {
  EdgeList out;
  for (NodeId u = 0; u < node_count(); ++u) {
    for (NodeId v : adjacency[u]) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

int compute_diameter(const std::vector<std::vector<NodeId>>& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  if (n == 0) return -1;
  int diameter = 0;
  std::vector<int> dist(n);
  std::deque<NodeId> queue;
  for (NodeId s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    queue.assign(1, s);
    int reached = 1;
    while (!queue.empty()) {
      NodeId u = queue.front();
      queue.pop_front();
      for (NodeId v : adjacency[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          diameter = std::max(diameter, dist[v]);
          ++reached;
          queue.push_back(v);
        }
      }
    }
    if (reached != n) return -1;
  }
  return diameter;
}

int max_degree(const std::vector<std::vector<NodeId>>& adjacency) {
  int d = 0;
  for (const auto& a : adjacency) d = std::max(d, static_cast<int>(a.size()));
  return d;
}

NetworkInstance assemble_instance(int n, int c, const EdgeList& edges,
                                  std::vector<std::vector<ChannelId>> label_perms) {
  NetworkInstance net;
  net.adjacency.assign(n, {});
  for (auto [u, v] : edges) {
    net.adjacency[u].push_back(v);
    net.adjacency[v].push_back(u);
  }
  for (auto& a : net.adjacency) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  net.label_perms = std::move(label_perms);
  net.channel_sets = net.label_perms;
  for (auto& s : net.channel_sets) std::sort(s.begin(), s.end());

  int k = c;
  int k_max = 0;
  bool any_edge = false;
  for (auto [u, v] : net.edges()) {
    int o = net.overlap(u, v);
    k = std::min(k, o);
    k_max = std::max(k_max, o);
    any_edge = true;
  }
  if (!any_edge) {
    k = 1;
    k_max = 1;
  }
  net.params = NetworkParams{n, c, k, k_max, max_degree(net.adjacency),
                             compute_diameter(net.adjacency)};
  return net;
}

std::vector<std::string> validate_instance(const NetworkInstance& net) {
  std::vector<std::string> out = net.params.problems();
  const auto& p = net.params;
  const int n = net.node_count();
  if (n != p.n) {
    out.push_back("node count " + std::to_string(n) + " != params.n " + std::to_string(p.n));
  }
  if (static_cast<int>(net.channel_sets.size()) != n ||
      static_cast<int>(net.label_perms.size()) != n) {
    out.push_back("channel_sets/labels must have one entry per node");
    return out;
  }
  for (NodeId u = 0; u < n; ++u) {
    const auto& a = net.adjacency[u];
    if (!std::is_sorted(a.begin(), a.end()) ||
        std::adjacent_find(a.begin(), a.end()) != a.end()) {
      out.push_back("node " + std::to_string(u) + ": adjacency not a sorted set");
    }
    for (NodeId v : a) {
      if (v < 0 || v >= n) {
        out.push_back("node " + std::to_string(u) + ": unknown neighbor " + std::to_string(v));
        continue;
      }
      if (v == u) out.push_back("node " + std::to_string(u) + ": self loop");
      if (!net.adjacent(v, u)) {
        out.push_back("edge (" + std::to_string(u) + "," + std::to_string(v) + ") not symmetric");
      }
    }
    const auto& set = net.channel_sets[u];
    if (static_cast<int>(set.size()) != p.c ||
        std::set<ChannelId>(set.begin(), set.end()).size() != set.size()) {
      out.push_back("node " + std::to_string(u) + ": channel set must hold " +
                    std::to_string(p.c) + " distinct channels");
    }
    auto perm = net.label_perms[u];
    std::sort(perm.begin(), perm.end());
    if (perm != set) {
      out.push_back("node " + std::to_string(u) + ": label permutation is not a bijection onto its channel set");
    }
    if (static_cast<int>(a.size()) > p.delta_max) {
      out.push_back("node " + std::to_string(u) + ": degree " + std::to_string(a.size()) +
                    " exceeds delta " + std::to_string(p.delta_max));
    }
  }
  for (auto [u, v] : net.edges()) {
    if (v >= n) continue;
    int o = net.overlap(u, v);
    if (o < p.k || o > p.k_max) {
      out.push_back("edge (" + std::to_string(u) + "," + std::to_string(v) + "): overlap " +
                    std::to_string(o) + " outside [" + std::to_string(p.k) + "," +
                    std::to_string(p.k_max) + "]");
    }
  }
  int d = compute_diameter(net.adjacency);
  if (d < 0) {
    out.push_back("graph is not connected");
  } else if (d != p.diam) {
    out.push_back("diameter " + std::to_string(d) + " != params.diam " + std::to_string(p.diam));
  }
  return out;
}

nlohmann::json instance_to_json(const NetworkInstance& net) {
  nlohmann::json j;
  const auto& p = net.params;
  j["params"] = {{"n", p.n}, {"c", p.c}, {"k", p.k}, {"k_max", p.k_max},
                 {"delta", p.delta_max}, {"diam", p.diam}};
  auto edges = nlohmann::json::array();
  for (auto [u, v] : net.edges()) edges.push_back({u, v});
  j["edges"] = edges;
  nlohmann::json channels = nlohmann::json::object();
  nlohmann::json labels = nlohmann::json::object();
  for (NodeId u = 0; u < net.node_count(); ++u) {
    channels[std::to_string(u)] = net.channel_sets[u];
    labels[std::to_string(u)] = net.label_perms[u];
  }
  j["channels"] = channels;
  j["labels"] = labels;
  return j;
}

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* name, const std::string& where) {
  if (!j.is_object() || !j.contains(name)) {
    throw ParseFault("missing field '" + where + name + "'");
  }
  return j.at(name);
}

int int_field(const nlohmann::json& j, const char* name, const std::string& where) {
  const auto& v = field(j, name, where);
  if (!v.is_number_integer()) throw ParseFault("field '" + where + name + "' must be an integer");
  return v.get<int>();
}

std::vector<ChannelId> id_list(const nlohmann::json& v, const std::string& where) {
  if (!v.is_array()) throw ParseFault("field '" + where + "' must be an array");
  std::vector<ChannelId> out;
  for (const auto& x : v) {
    if (!x.is_number_integer()) throw ParseFault("field '" + where + "' must hold integers");
    out.push_back(x.get<ChannelId>());
  }
  return out;
}

}  // namespace

NetworkInstance instance_from_json(const nlohmann::json& j) {
  NetworkInstance net;
  const auto& pj = field(j, "params", "");
  auto& p = net.params;
  p.n = int_field(pj, "n", "params.");
  p.c = int_field(pj, "c", "params.");
  p.k = int_field(pj, "k", "params.");
  p.k_max = int_field(pj, "k_max", "params.");
  p.delta_max = int_field(pj, "delta", "params.");
  p.diam = int_field(pj, "diam", "params.");
  if (p.n < 0) throw ParseFault("field 'params.n' must be non-negative");

  net.adjacency.assign(p.n, {});
  const auto& ej = field(j, "edges", "");
  if (!ej.is_array()) throw ParseFault("field 'edges' must be an array");
  for (std::size_t i = 0; i < ej.size(); ++i) {
    const auto& e = ej[i];
    const std::string where = "edges[" + std::to_string(i) + "]";
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      throw ParseFault("field '" + where + "' must be [u, v]");
    }
    auto u = e[0].get<NodeId>();
    auto v = e[1].get<NodeId>();
    if (u < 0 || v < 0 || u >= p.n || v >= p.n) {
      throw ParseFault("field '" + where + "' names a node outside [0, n)");
    }
    net.adjacency[u].push_back(v);
    net.adjacency[v].push_back(u);
  }
  for (auto& a : net.adjacency) std::sort(a.begin(), a.end());

  const auto& cj = field(j, "channels", "");
  const auto& lj = field(j, "labels", "");
  net.channel_sets.resize(p.n);
  net.label_perms.resize(p.n);
  for (NodeId u = 0; u < p.n; ++u) {
    const auto key = std::to_string(u);
    net.channel_sets[u] = id_list(field(cj, key.c_str(), "channels."), "channels." + key);
    std::sort(net.channel_sets[u].begin(), net.channel_sets[u].end());
    net.label_perms[u] = id_list(field(lj, key.c_str(), "labels."), "labels." + key);
  }
  return net;
}

NetworkInstance parse_instance(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t upto = std::min(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ParseFault("malformed instance JSON at line " + std::to_string(line) + ": " + e.what());
  }
  return instance_from_json(j);
}

void save_instance(const NetworkInstance& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write instance file " + path.string());
  out << instance_to_json(net).dump(1) << '\n';
  if (!out) throw Error("failed writing instance file " + path.string());
}

NetworkInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseFault("cannot open instance file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

}  // namespace crn
