#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "crn/types.hpp"

namespace crn {

/// Public knowledge every node has about the network.
struct NetworkParams {
  int n = 0;
  int c = 0;
  int k = 0;
  int k_max = 0;
  int delta_max = 0;
  int diam = 0;

  bool operator==(const NetworkParams&) const = default;
  /// Violated invariants, empty when consistent.
  std::vector<std::string> problems() const;
};

using EdgeList = std::vector<std::pair<NodeId, NodeId>>;

/// Ground truth of a cognitive radio network. Protocols never see this
/// directly; they only get a NodeView and talk through local labels.
struct NetworkInstance {
  NetworkParams params;
  /// Sorted neighbor lists.
  std::vector<std::vector<NodeId>> adjacency;
  /// Sorted global channel ids per node.
  std::vector<std::vector<ChannelId>> channel_sets;
  /// label_perms[u][l - 1] is the global channel behind u's local label l.
  std::vector<std::vector<ChannelId>> label_perms;

  int node_count() const { return static_cast<int>(adjacency.size()); }
  ChannelId global_channel(NodeId u, Label label) const {
    return label_perms[u][label - 1];
  }
  bool adjacent(NodeId u, NodeId v) const;
  int overlap(NodeId u, NodeId v) const;
  /// Local label at which `u` sees global channel `g`, or 0.
  Label label_of(NodeId u, ChannelId g) const;
  /// Edges with u < v, lexicographic.
  EdgeList edges() const;

  bool operator==(const NetworkInstance&) const = default;
};

/// Builds an instance from raw parts, sorting adjacency and channel sets.
/// Params n, delta_max, diam, k, k_max are recomputed from the realization.
NetworkInstance assemble_instance(int n, int c, const EdgeList& edges,
                                  std::vector<std::vector<ChannelId>> label_perms);

/// BFS diameter; -1 when disconnected.
int compute_diameter(const std::vector<std::vector<NodeId>>& adjacency);
int max_degree(const std::vector<std::vector<NodeId>>& adjacency);

/// Every violated NetworkInstance invariant, one human-readable line each.
std::vector<std::string> validate_instance(const NetworkInstance& net);

nlohmann::json instance_to_json(const NetworkInstance& net);
NetworkInstance instance_from_json(const nlohmann::json& j);
void save_instance(const NetworkInstance& net, const std::filesystem::path& path);
NetworkInstance load_instance(const std::filesystem::path& path);
NetworkInstance parse_instance(const std::string& text);

}  // namespace crn
