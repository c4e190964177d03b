#pragma once

#include <cstdint>
#include <vector>

#include "crn/network.hpp"

namespace crn {

/// Two adjacent nodes sharing exactly k of their c channels. Node 0 owns
/// global channels 0..c-1.
NetworkInstance gen_two_node(int c, int k, std::uint64_t seed);

/// Hub 0 with `delta` leaves. Each hub-leaf overlap is uniform in
/// [k, k_max] (k_max = 0 means k_max = k). Channels come from a pool of
/// `pool` global ids (0 means 3c).
NetworkInstance gen_star(int delta, int c, int k, std::uint64_t seed, int k_max = 0, int pool = 0);

/// Star whose i-th leaf overlaps the hub on exactly overlaps[i] channels.
NetworkInstance gen_star_profile(const std::vector<int>& overlaps, int c, std::uint64_t seed,
                                 int pool = 0);

/// Complete tree of height `depth`, every internal node having
/// min(c, delta) - 1 children. Siblings share no channel; every parent-child
/// pair shares exactly k channels.
NetworkInstance gen_complete_tree(int depth, int c, int delta, std::uint64_t seed, int k = 1);

/// Assignment-first random instance: each node draws a c-subset of the pool,
/// pairs whose overlap lies in [k, k_max] become edges with probability
/// edge_density, resampled until connected (at most 200 attempts).
NetworkInstance gen_random(int n, int pool, int c, int k, int k_max, double edge_density,
                           std::uint64_t seed);

/// Same instance with every node's local labels freshly permuted.
NetworkInstance shuffle_labels(const NetworkInstance& net, std::uint64_t seed);

}  // namespace crn
