#pragma once

#include <optional>

#include "nic/messages.hpp"
#include "nic/sim/trace.hpp"
#include "nic/units.hpp"

namespace nic::sim {

/// Environment command delivered to a node by the scenario script.
struct Command {
  enum class Kind { kInitiate } kind{Kind::kInitiate};
};

/// What a node may do while handling an event. Correct nodes only ever see
/// their own hardware clock; reference time stays inside the kernel.
class NodeContext {
 public:
  virtual ~NodeContext() = default;

  virtual NodeId self() const = 0;
  virtual int n() const = 0;
  virtual LocalTime now() const = 0;

  virtual void send(NodeId to, Message msg) = 0;
  /// Sends with an adversary-chosen delay in (0, d). Byzantine nodes only.
  virtual void send_with_delay(NodeId to, Message msg, RealTime delay) = 0;

  /// Requests an on_wake call once the local clock reaches `value`.
  virtual void wake_at(LocalTime value) = 0;

  /// Appends a node-level record; time and node are filled in by the kernel.
  virtual void record(TraceEvent ev) = 0;
};

class Process {
 public:
  virtual ~Process() = default;

  virtual bool correct() const { return true; }
  virtual void on_start(NodeContext&) {}
  virtual void on_deliver(NodeContext& ctx, NodeId from, const Message& msg) = 0;
  virtual void on_wake(NodeContext& ctx, LocalTime value) = 0;
  virtual void on_command(NodeContext&, const Command&) {}

  /// Read-only inspection used by the harness probes.
  virtual std::optional<Stamp> probe_estimate(NodeId, LocalTime) const { return std::nullopt; }
};

}  // namespace nic::sim
