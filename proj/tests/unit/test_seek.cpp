#include <doctest.h>

#include <cmath>
#include <vector>

#include "crn/seek.hpp"
#include "crn/topology.hpp"
#include "oracles.hpp"

using namespace crn;

TEST_CASE("full-mode budget follows the closed form") {
  const NetworkParams p{32, 8, 2, 6, 12, 3};
  SeekConfig cfg;
  const auto b = seek_budget(p, cfg);
  CHECK(b.part1_steps == static_cast<std::int64_t>(std::ceil(4.0 * 64 / 2 * 5.0)));
  CHECK(b.part2_steps == static_cast<std::int64_t>(std::ceil(4.0 * 3.0 * 12 * 5.0)));
  CHECK(b.backoff_exp == 4);
  CHECK(b.backoff_len == 4);
  CHECK(b.count_len == CountConfig::make(32, 12).total_slots());
  CHECK(b.total_slots() == b.part1_steps * b.count_len + b.part2_steps * 4);

  cfg.log_base = std::exp(1.0);
  const auto ln = seek_budget(p, cfg);
  CHECK(ln.part1_steps == static_cast<std::int64_t>(std::ceil(4.0 * 32 * std::log(32.0))));
}

TEST_CASE("filter-mode budget and its fallback") {
  const NetworkParams p{26, 8, 1, 4, 25, 2};
  SeekConfig cfg;
  cfg.mode = SeekMode::kFilter;
  cfg.k_hat = 4;
  const double lg = std::log2(26.0);
  auto b = seek_budget(p, cfg);
  CHECK(b.part1_steps == static_cast<std::int64_t>(std::ceil(4.0 * 16 * lg)));
  CHECK(b.part2_steps == static_cast<std::int64_t>(std::ceil(4.0 * (1.0 * 25 + 8) * lg)));
  cfg.delta_khat = 5;
  b = seek_budget(p, cfg);
  CHECK(b.part2_steps == static_cast<std::int64_t>(std::ceil(4.0 * (1.0 * 5 + 25 + 8) * lg)));
  cfg.k_hat = 0;
  CHECK_THROWS_AS(seek_budget(p, cfg), ParameterFault);
}

TEST_CASE("filter with k_hat = k matches the full budget's first part") {
  const NetworkParams p{16, 4, 2, 4, 6, 3};
  SeekConfig full;
  SeekConfig filt;
  filt.mode = SeekMode::kFilter;
  filt.k_hat = 2;
  CHECK(seek_budget(p, full).part1_steps == seek_budget(p, filt).part1_steps);
  CHECK(seek_budget(p, full).count_len == seek_budget(p, filt).count_len);
}

TEST_CASE("weighted channel pick") {
  auto rng = derive_stream(1, 0, 0);
  const std::vector<std::int64_t> only2 = {0, 10, 0, 0};
  for (int i = 0; i < 200; ++i) CHECK(weighted_channel_pick(only2, 10, rng) == 2);

  const std::vector<std::int64_t> three_one = {3, 1};
  const int n = 10000;
  int first = 0;
  for (int i = 0; i < n; ++i) first += weighted_channel_pick(three_one, 4, rng) == 1;
  CHECK(std::abs(first / double(n) - 0.75) < oracle::binomial_band(0.75, n));

  const std::vector<std::int64_t> none = {0, 0, 0, 0};
  std::vector<int> hist(5, 0);
  for (int i = 0; i < n; ++i) ++hist[weighted_channel_pick(none, 0, rng)];
  for (int l = 1; l <= 4; ++l) CHECK(std::abs(hist[l] / double(n) - 0.25) < oracle::binomial_band(0.25, n));
}

TEST_CASE("back-off slot probabilities") {
  SeekState st;
  st.counts.assign(2, 0);
  auto rng = derive_stream(2, 0, 0);

  SeekBudget d2;
  d2.backoff_exp = 1;
  d2.backoff_len = 1;
  SeekBudget d8;
  d8.backoff_exp = 3;
  d8.backoff_len = 3;

  const int n = 20000;
  int bcast2 = 0, fired2 = 0, bcast8 = 0;
  std::vector<int> fired8(3, 0);
  for (int i = 0; i < n; ++i) {
    const auto a = part2_step(st, d2, rng);
    if (!a.listener) {
      ++bcast2;
      fired2 += (a.fire_mask & 1U) != 0;
    }
    const auto b = part2_step(st, d8, rng);
    if (!b.listener) {
      ++bcast8;
      for (int s = 0; s < 3; ++s) fired8[s] += ((b.fire_mask >> s) & 1U) != 0;
    }
  }
  CHECK(std::abs(fired2 / double(bcast2) - 0.5) < oracle::binomial_band(0.5, bcast2));
  const double want[] = {0.125, 0.25, 0.5};
  for (int s = 0; s < 3; ++s) {
    CHECK(std::abs(fired8[s] / double(bcast8) - want[s]) < oracle::binomial_band(want[s], bcast8));
  }
}

TEST_CASE("lone broadcaster gets through a delta=8 block w.p. 0.671875") {
  CHECK(oracle::backoff_success(3) == doctest::Approx(0.671875));
  SeekState st;
  st.counts.assign(1, 0);
  SeekBudget b;
  b.backoff_exp = 3;
  b.backoff_len = 3;
  auto rng = derive_stream(4, 0, 0);
  int steps = 0, through = 0;
  while (steps < 20000) {
    const auto plan = part2_step(st, b, rng);
    if (plan.listener) continue;
    ++steps;
    through += plan.fire_mask != 0;
  }
  CHECK(std::abs(through / double(steps) - 0.671875) < oracle::binomial_band(0.671875, steps));
}

TEST_CASE("two nodes on one channel meet within 64 steps") {
  // Per step P[u listens and v broadcasts] = 1/4, so 64 steps miss with
  // probability (3/4)^64.
  int found = 0;
  const int trials = 200;
  const auto net = gen_two_node(1, 1, 0);
  SeekConfig cfg;
  cfg.a1 = 64;  // lg 2 = 1, so part one runs 64 steps
  for (int s = 0; s < trials; ++s) {
    const auto r = cseek(net, cfg, s);
    const auto& m = r.machines[0];
    const auto it = m.state().first_heard.find(1);
    found += it != m.state().first_heard.end() && it->second / m.budget().count_len < 64;
  }
  CHECK(found >= 198);
}

TEST_CASE("isolated node learns nothing") {
  const auto net = assemble_instance(3, 2, {{0, 1}}, {{0, 1}, {0, 1}, {5, 6}});
  SeekConfig cfg;
  const auto r = cseek(net, cfg, 3);
  CHECK(r.machines[2].state().ids.empty());
  CHECK(r.machines[2].state().sum == 0);
  for (auto v : r.machines[2].state().counts) CHECK(v == 0);
}

TEST_CASE("hub count mass matches the closed-form scale") {
  const auto net = gen_star(8, 1, 1, 2, 1, 1);
  SeekConfig cfg;
  const int trials = 20;
  double mean = 0;
  std::int64_t steps = 0;
  for (int s = 0; s < trials; ++s) {
    const auto r = cseek(net, cfg, s);
    mean += static_cast<double>(r.machines[0].state().sum) / trials;
    steps = r.machines[0].budget().part1_steps;
  }
  const double expect = 8.0 * static_cast<double>(steps) / 4.0;
  CHECK(mean >= expect / 4);
  CHECK(mean <= expect * 4);
}

TEST_CASE("state bookkeeping stays consistent") {
  const auto net = gen_random(12, 8, 4, 2, 4, 0.4, 6);
  SeekConfig cfg;
  const auto r = cseek(net, cfg, 1);
  for (const auto& m : r.machines) {
    std::int64_t total = 0;
    for (auto v : m.state().counts) total += v;
    CHECK(total == m.state().sum);
    CHECK(m.state().first_heard.size() == m.state().ids.size());
    CHECK(m.state().payload_log.size() == m.state().ids.size());
  }
}

TEST_CASE("random n=16 nets are discovered exactly") {
  SeekConfig cfg;
  int complete = 0;
  for (int s = 0; s < 100; ++s) {
    const auto net = gen_random(16, 8, 4, 2, 4, 0.3, 100 + s);
    const auto r = cseek(net, cfg, s);
    REQUIRE(discovery_sound(net, r.machines));
    complete += discovery_complete(net, r.machines);
  }
  CHECK(complete >= 90);
}

TEST_CASE("ckseek finds the good neighbors and refuses k_hat < k") {
  std::vector<int> overlaps(5, 4);
  overlaps.resize(25, 1);
  SeekConfig cfg;
  cfg.k_hat = 4;
  cfg.delta_khat = 5;
  int ok = 0;
  for (int s = 0; s < 20; ++s) {
    const auto net = gen_star_profile(overlaps, 8, s);
    const auto r = ckseek(net, cfg, s);
    ok += discovery_complete(net, r.machines, 4);
  }
  CHECK(ok >= 19);

  const auto net = gen_two_node(4, 2, 0);
  cfg.k_hat = 1;
  CHECK_THROWS_AS(ckseek(net, cfg, 0), ParameterFault);
}

TEST_CASE("two-node run: both sides discover each other") {
  const auto net = gen_two_node(1, 1, 0);
  SeekConfig cfg;
  const auto r = cseek(net, cfg, 12);
  CHECK(r.machines[0].state().ids.contains(1));
  CHECK(r.machines[1].state().ids.contains(0));
  const auto t = slots_to_discovery(net, r.machines);
  REQUIRE(t);
  CHECK(*t >= 1);
}
