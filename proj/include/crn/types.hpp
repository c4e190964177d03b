#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace crn {

using NodeId = std::int32_t;
using Slot = std::int64_t;
/// Node-local channel label, 1-based.
using Label = std::int32_t;
/// Global channel id. Never visible to protocol state machines.
using ChannelId = std::int32_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad instance or action handed to the simulator.
class ConfigurationFault : public Error {
 public:
  using Error::Error;
};

/// Generator or protocol parameters that cannot be realized.
class ParameterFault : public Error {
 public:
  using Error::Error;
};

/// Random generation gave up after its retry cap.
class GenerationFault : public Error {
 public:
  using Error::Error;
};

class ParseFault : public Error {
 public:
  using Error::Error;
};

class PlayerFault : public Error {
 public:
  using Error::Error;
};

/// A state machine misbehaved mid-run.
class SimulationAbort : public Error {
 public:
  SimulationAbort(NodeId node, Slot slot, const std::string& what)
      : Error("node " + std::to_string(node) + " at slot " +
              std::to_string(slot) + ": " + what),
        node_(node),
        slot_(slot) {}

  NodeId node() const noexcept { return node_; }
  Slot slot() const noexcept { return slot_; }

 private:
  NodeId node_;
  Slot slot_;
};

}  // namespace crn
