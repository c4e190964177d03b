#include "crn/payload.hpp"

#include <type_traits>

namespace crn {
namespace {

template <class T>
void put(std::vector<std::uint8_t>& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
  }
}

}  // namespace

std::optional<NodeId> sender_of(const Payload& p) {
  return std::visit(
      [](const auto& v) -> std::optional<NodeId> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Data>) {
          return std::nullopt;
        } else {
          return v.id;
        }
      },
      p);
}

std::vector<std::uint8_t> to_bytes(const Payload& p) {
  std::vector<std::uint8_t> out;
  out.push_back(static_cast<std::uint8_t>(p.index()));
  std::visit(
      [&out](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Identity>) {
          put(out, v.id);
        } else if constexpr (std::is_same_v<T, IdentityWithTimes>) {
          put(out, v.id);
          put(out, static_cast<std::uint32_t>(v.heard.size()));
          for (const auto& h : v.heard) {
            put(out, h.neighbor);
            put(out, h.slot);
          }
        } else if constexpr (std::is_same_v<T, ColorInfo>) {
          put(out, v.id);
          put(out, static_cast<std::uint32_t>(v.entries.size()));
          for (const auto& e : v.entries) {
            put(out, e.a);
            put(out, e.b);
            put(out, static_cast<std::int32_t>(e.color));
            put(out, static_cast<std::uint8_t>(e.tag));
          }
        } else {
          put(out, static_cast<std::uint32_t>(v.bytes.size()));
          out.insert(out.end(), v.bytes.begin(), v.bytes.end());
        }
      },
      p);
  return out;
}

}  // namespace crn
