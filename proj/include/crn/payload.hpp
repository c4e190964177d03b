#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "crn/types.hpp"

namespace crn {

struct Identity {
  NodeId id = 0;
  bool operator==(const Identity&) const = default;
};

struct HeardAt {
  NodeId neighbor = 0;
  Slot slot = 0;
  bool operator==(const HeardAt&) const = default;
};

/// Identity plus the slots in which the sender first heard each neighbor.
struct IdentityWithTimes {
  NodeId id = 0;
  std::vector<HeardAt> heard;
  bool operator==(const IdentityWithTimes&) const = default;
};

enum class ColorTag : std::uint8_t { kTentative = 0, kDecided = 1, kHandoff = 2 };

/// Color of the edge {a, b}; a < b.
struct ColorEntry {
  NodeId a = 0;
  NodeId b = 0;
  int color = 0;
  ColorTag tag = ColorTag::kTentative;
  auto operator<=>(const ColorEntry&) const = default;
};

struct ColorInfo {
  NodeId id = 0;
  std::vector<ColorEntry> entries;
  bool operator==(const ColorInfo&) const = default;
};

struct Data {
  std::vector<std::uint8_t> bytes;
  bool operator==(const Data&) const = default;
};

using Payload = std::variant<Identity, IdentityWithTimes, ColorInfo, Data>;

/// Identity carried by the payload, if any. Data payloads are anonymous.
std::optional<NodeId> sender_of(const Payload& p);

/// Canonical little-endian encoding: one tag byte, then fields in
/// declaration order, vectors length-prefixed with a u32.
std::vector<std::uint8_t> to_bytes(const Payload& p);

}  // namespace crn
