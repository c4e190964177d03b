#include "crn/topology.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "crn/rng.hpp"

namespace crn {
namespace {

constexpr int kMaxAttempts = 200;

template <class T>
void shuffle(std::vector<T>& v, RngStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

/// `count` distinct elements of `from`, uniformly.
std::vector<ChannelId> sample(std::vector<ChannelId> from, int count, RngStream& rng) {
  for (int i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(from.size() - i));
    std::swap(from[i], from[j]);
  }
  from.resize(count);
  return from;
}

std::vector<ChannelId> iota_ids(int count, int start = 0) {
  std::vector<ChannelId> v(count);
  std::iota(v.begin(), v.end(), start);
  return v;
}

std::vector<ChannelId> minus(const std::vector<ChannelId>& all, std::vector<ChannelId> drop) {
  std::sort(drop.begin(), drop.end());
  std::vector<ChannelId> out;
  for (ChannelId x : all) {
    if (!std::binary_search(drop.begin(), drop.end(), x)) out.push_back(x);
  }
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterFault(what);
}

NetworkInstance star_from_overlaps(const std::vector<int>& overlaps, int c, int pool,
                                   RngStream& rng) {
  const int delta = static_cast<int>(overlaps.size());
  require(delta >= 1, "star needs at least one leaf");
  require(c >= 1, "c must be >= 1");
  if (pool == 0) pool = 3 * c;
  const int min_overlap = *std::min_element(overlaps.begin(), overlaps.end());
  require(pool >= c, "pool must be at least c");
  require(pool - c >= c - min_overlap,
          "pool of " + std::to_string(pool) + " channels leaves fewer than c - k = " +
              std::to_string(c - min_overlap) + " channels outside the hub's set");

  const auto all = iota_ids(pool);
  std::vector<std::vector<ChannelId>> perms(delta + 1);
  perms[0] = sample(all, c, rng);
  const auto outside = minus(all, perms[0]);
  EdgeList edges;
  for (int i = 0; i < delta; ++i) {
    const int o = overlaps[i];
    require(o >= 1 && o <= c, "leaf overlap must lie in [1, c]");
    auto set = sample(perms[0], o, rng);
    auto rest = sample(outside, c - o, rng);
    set.insert(set.end(), rest.begin(), rest.end());
    shuffle(set, rng);
    perms[i + 1] = std::move(set);
    edges.emplace_back(0, i + 1);
  }
  shuffle(perms[0], rng);
  return assemble_instance(delta + 1, c, edges, std::move(perms));
}

}  // namespace

NetworkInstance gen_two_node(int c, int k, std::uint64_t seed) {
  require(c >= 1, "c must be >= 1");
  require(k >= 1 && k <= c, "need 1 <= k <= c (k=" + std::to_string(k) + ", c=" + std::to_string(c) + ")");
  auto rng = derive_stream(seed, 0, 0x70);
  auto a = iota_ids(c);
  auto b = sample(a, k, rng);
  auto fresh = iota_ids(c - k, c);
  b.insert(b.end(), fresh.begin(), fresh.end());
  shuffle(a, rng);
  shuffle(b, rng);
  return assemble_instance(2, c, {{0, 1}}, {a, b});
}

NetworkInstance gen_star(int delta, int c, int k, std::uint64_t seed, int k_max, int pool) {
  if (k_max == 0) k_max = k;
  require(delta >= 1, "delta must be >= 1");
  require(1 <= k && k <= k_max && k_max <= c, "need 1 <= k <= k_max <= c");
  auto rng = derive_stream(seed, 0, 0x71);
  std::vector<int> overlaps(delta);
  for (auto& o : overlaps) o = static_cast<int>(rng.uniform_int(k, k_max));
  return star_from_overlaps(overlaps, c, pool, rng);
}

NetworkInstance gen_star_profile(const std::vector<int>& overlaps, int c, std::uint64_t seed,
                                 int pool) {
  auto rng = derive_stream(seed, 0, 0x72);
  return star_from_overlaps(overlaps, c, pool, rng);
}

NetworkInstance gen_complete_tree(int depth, int c, int delta, std::uint64_t seed, int k) {
  require(depth >= 1, "depth must be >= 1");
  require(k >= 1 && k <= c, "need 1 <= k <= c");
  const int children = std::min(c, delta) - 1;
  require(children >= 1, "min(c, delta) - 1 must be >= 1");
  require(children * k <= c,
          "parent has " + std::to_string(c) + " channels, too few for " + std::to_string(children) +
              " children with disjoint overlaps of size " + std::to_string(k));
  auto rng = derive_stream(seed, 0, 0x73);

  std::vector<std::vector<ChannelId>> sets{iota_ids(c)};
  ChannelId next_fresh = c;
  EdgeList edges;
  std::vector<NodeId> frontier{0};
  for (int level = 0; level < depth; ++level) {
    std::vector<NodeId> next;
    for (NodeId parent : frontier) {
      auto parent_channels = sample(sets[parent], children * k, rng);
      for (int i = 0; i < children; ++i) {
        std::vector<ChannelId> set(parent_channels.begin() + i * k,
                                   parent_channels.begin() + (i + 1) * k);
        for (int j = k; j < c; ++j) set.push_back(next_fresh++);
        const auto child = static_cast<NodeId>(sets.size());
        sets.push_back(std::move(set));
        edges.emplace_back(parent, child);
        next.push_back(child);
      }
    }
    frontier = std::move(next);
  }
  for (auto& s : sets) shuffle(s, rng);
  const int n = static_cast<int>(sets.size());
  return assemble_instance(n, c, edges, std::move(sets));
}

NetworkInstance gen_random(int n, int pool, int c, int k, int k_max, double edge_density,
                           std::uint64_t seed) {
  require(n >= 2, "n must be >= 2");
  require(pool >= c, "pool must be >= c");
  require(1 <= k && k <= k_max && k_max <= c, "need 1 <= k <= k_max <= c");
  require(edge_density > 0.0 && edge_density <= 1.0, "edge_density must lie in (0, 1]");
  auto rng = derive_stream(seed, 0, 0x74);
  const auto all = iota_ids(pool);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<std::vector<ChannelId>> perms(n);
    for (auto& p : perms) p = sample(all, c, rng);
    auto sorted = perms;
    for (auto& s : sorted) std::sort(s.begin(), s.end());
    EdgeList edges;
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) {
        std::vector<ChannelId> shared;
        std::set_intersection(sorted[u].begin(), sorted[u].end(), sorted[v].begin(),
                              sorted[v].end(), std::back_inserter(shared));
        const int o = static_cast<int>(shared.size());
        if (o < k || o > k_max) continue;
        if (rng.bernoulli(edge_density)) edges.emplace_back(u, v);
      }
    }
    auto net = assemble_instance(n, c, edges, std::move(perms));
    if (net.params.diam > 0) return net;
  }
  throw GenerationFault("gen_random: no connected instance after " + std::to_string(kMaxAttempts) +
                        " attempts; raise edge_density or k_max, or shrink pool");
}

NetworkInstance shuffle_labels(const NetworkInstance& net, std::uint64_t seed) {
  auto out = net;
  auto rng = derive_stream(seed, 0, 0x75);
  for (auto& p : out.label_perms) shuffle(p, rng);
  return out;
}

}  // namespace crn
