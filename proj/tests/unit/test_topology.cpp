#include <doctest.h>

#include <filesystem>
#include <map>
#include <set>

#include "crn/network.hpp"
#include "crn/topology.hpp"

using namespace crn;

namespace {

bool disjoint(const std::vector<ChannelId>& a, const std::vector<ChannelId>& b) {
  for (auto x : a) {
    for (auto y : b) {
      if (x == y) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("two-node instances share exactly k channels") {
  const auto one = gen_two_node(1, 1, 0);
  CHECK(one.channel_sets[0] == one.channel_sets[1]);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto net = gen_two_node(4, 2, s);
    CHECK(validate_instance(net).empty());
    CHECK(net.overlap(0, 1) == 2);
    CHECK(net.params.k == 2);
  }
  CHECK_THROWS_AS(gen_two_node(2, 3, 0), ParameterFault);
}

TEST_CASE("two-node overlap matching is uniform over label pairs") {
  // c=2, k=1: the shared channel sits at one of 4 (label_u, label_v) pairs.
  std::map<std::pair<Label, Label>, int> hist;
  const int trials = 4000;
  for (int s = 0; s < trials; ++s) {
    const auto net = gen_two_node(2, 1, s);
    for (Label a = 1; a <= 2; ++a) {
      for (Label b = 1; b <= 2; ++b) {
        if (net.global_channel(0, a) == net.global_channel(1, b)) ++hist[{a, b}];
      }
    }
  }
  REQUIRE(hist.size() == 4);
  double chi2 = 0;
  for (const auto& [_, h] : hist) chi2 += (h - trials / 4.0) * (h - trials / 4.0) / (trials / 4.0);
  // 3 degrees of freedom, 99.9% quantile about 16.3.
  CHECK(chi2 < 16.3);
}

TEST_CASE("star instances") {
  const auto single = gen_star(1, 3, 1, 0);
  CHECK(single.node_count() == 2);
  const auto net = gen_star(8, 4, 2, 7);
  CHECK(validate_instance(net).empty());
  CHECK(net.adjacency[0].size() == 8);
  for (NodeId v = 1; v <= 8; ++v) CHECK(net.overlap(0, v) >= 2);
  for (NodeId a = 1; a <= 8; ++a) {
    for (NodeId b = a + 1; b <= 8; ++b) CHECK_FALSE(net.adjacent(a, b));
  }
  const auto profile = gen_star_profile({4, 4, 1}, 8, 3);
  CHECK(profile.overlap(0, 1) == 4);
  CHECK(profile.overlap(0, 3) == 1);
  CHECK(validate_instance(profile).empty());
}

TEST_CASE("complete trees keep siblings apart") {
  const auto star = gen_complete_tree(1, 3, 3, 0);
  CHECK(star.node_count() == 3);
  CHECK(disjoint(star.channel_sets[1], star.channel_sets[2]));

  const auto net = gen_complete_tree(2, 4, 4, 5);
  CHECK(net.node_count() == 1 + 3 + 9);
  CHECK(validate_instance(net).empty());
  for (NodeId u = 0; u < net.node_count(); ++u) {
    std::vector<NodeId> kids;
    for (NodeId v : net.adjacency[u]) {
      if (v > u) kids.push_back(v);
    }
    for (std::size_t i = 0; i < kids.size(); ++i) {
      CHECK(net.overlap(u, kids[i]) >= 1);
      for (std::size_t j = i + 1; j < kids.size(); ++j) {
        CHECK(disjoint(net.channel_sets[kids[i]], net.channel_sets[kids[j]]));
      }
    }
  }
  CHECK_THROWS_AS(gen_complete_tree(2, 4, 4, 0, 2), ParameterFault);
}

TEST_CASE("random instances respect overlap bounds and connectivity") {
  const auto pair = gen_random(2, 3, 3, 1, 3, 1.0, 0);
  CHECK(pair.edges().size() == 1);
  const auto net = gen_random(32, 24, 8, 2, 8, 0.3, 11);
  CHECK(validate_instance(net).empty());
  CHECK(net.params.diam >= 1);
  for (auto [u, v] : net.edges()) {
    CHECK(net.overlap(u, v) >= 2);
    CHECK(net.overlap(u, v) <= 8);
  }
  CHECK_THROWS_AS(gen_random(32, 100, 2, 2, 2, 0.01, 0), GenerationFault);
}

TEST_CASE("validator names a bad edge") {
  auto net = gen_random(8, 12, 4, 2, 4, 0.5, 3);
  REQUIRE(validate_instance(net).empty());
  // Swap one endpoint's channels for fresh ids so its edges lose overlap.
  const auto [u, v] = net.edges().front();
  auto perms = net.label_perms;
  for (auto& g : perms[v]) g += 1000;
  auto broken = net;
  broken.label_perms = perms;
  broken.channel_sets[v] = perms[v];
  std::sort(broken.channel_sets[v].begin(), broken.channel_sets[v].end());
  const auto problems = validate_instance(broken);
  CHECK_FALSE(problems.empty());
  bool named = false;
  for (const auto& p : problems) {
    named = named || p.find(std::to_string(u)) != std::string::npos;
  }
  CHECK(named);
}

TEST_CASE("save and load round-trip") {
  const auto net = gen_complete_tree(2, 3, 3, 9);
  const auto path = std::filesystem::temp_directory_path() / "crn_roundtrip_instance.json";
  save_instance(net, path);
  CHECK(load_instance(path) == net);
  std::filesystem::remove(path);
  CHECK(instance_from_json(instance_to_json(net)) == net);
}

TEST_CASE("malformed instance text reports where") {
  try {
    parse_instance("{\n\"params\": {\n}, ,\n}");
    FAIL("expected a parse fault");
  } catch (const ParseFault& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
  try {
    parse_instance(R"({"params": {"n": 2, "c": 1, "k": 1, "k_max": 1, "delta": 1, "diam": 1}})");
    FAIL("expected a parse fault");
  } catch (const ParseFault& e) {
    CHECK(std::string(e.what()).find("edges") != std::string::npos);
  }
}

TEST_CASE("relabeling keeps the channel sets") {
  const auto net = gen_random(10, 12, 4, 1, 4, 0.4, 2);
  const auto shuffled = shuffle_labels(net, 77);
  CHECK(shuffled.channel_sets == net.channel_sets);
  CHECK(shuffled.adjacency == net.adjacency);
  CHECK(validate_instance(shuffled).empty());
}
