#include "crn/rng.hpp"

namespace crn {

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t node_scope,
                     std::uint64_t purpose_tag)
    : master_seed_(master_seed),
      node_scope_(node_scope),
      purpose_tag_(purpose_tag) {
  std::uint64_t k = mix64(master_seed);
  k = mix64(k ^ (node_scope * 0xd6e8feb86659fd93ULL + 0x632be59bd9b4e019ULL));
  k = mix64(k ^ (purpose_tag * 0xa0761d6478bd642fULL + 0xe7037ed1a0b428dbULL));
  key_ = k;
}

std::uint64_t RngStream::below(std::uint64_t bound) noexcept {
  // Lemire's nearly divisionless method.
  std::uint64_t x = (*this)();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = (*this)();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(below(span));
}

double RngStream::uniform01() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

bool RngStream::bernoulli(double p) noexcept {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform01() < p;
}

RngStream derive_stream(std::uint64_t master_seed, std::uint64_t node_scope,
                        std::uint64_t purpose_tag) {
  return RngStream(master_seed, node_scope, purpose_tag);
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
  return mix64(mix64(master_seed) ^ mix64(trial_index + 0x5851f42d4c957f2dULL));
}

}  // namespace crn
