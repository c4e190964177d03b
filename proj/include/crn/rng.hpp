#pragma once

#include <cstdint>
#include <limits>

namespace crn {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream. Draw i is a pure function of
/// (master_seed, node_scope, purpose_tag, i), so any stream can be rebuilt
/// and replayed without shared state.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream() = default;
  RngStream(std::uint64_t master_seed, std::uint64_t node_scope,
            std::uint64_t purpose_tag);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept;
  /// Uniform double in [0, 1) with 53 bits of precision.
  double uniform01() noexcept;
  bool bernoulli(double p) noexcept;
  /// True with probability exactly 1/denominator.
  bool one_in(std::uint64_t denominator) noexcept { return below(denominator) == 0; }
  bool coin() noexcept { return ((*this)() >> 63) != 0; }

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t node_scope() const noexcept { return node_scope_; }
  std::uint64_t purpose_tag() const noexcept { return purpose_tag_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t master_seed_ = 0;
  std::uint64_t node_scope_ = 0;
  std::uint64_t purpose_tag_ = 0;
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

RngStream derive_stream(std::uint64_t master_seed, std::uint64_t node_scope,
                        std::uint64_t purpose_tag);

/// Seed of trial `trial_index` under `master_seed`.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index);

}  // namespace crn
