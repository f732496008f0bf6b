#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "nic/constants.hpp"
#include "nic/messages.hpp"
#include "nic/silent/protocol.hpp"
#include "nic/sim/trace.hpp"

namespace nic::rounds {

struct Slot {
  bool stored{false};
  std::optional<Payload> payload;
};

struct RoundState {
  InstanceLabel label;
  // thresholds[i] for i in 1..R+1; index 0 unused.
  std::vector<std::optional<LocalTime>> thresholds;
  int next_round{1};
  // inbox[i][u] for rounds i in 1..R; index 0 unused.
  std::vector<std::vector<Slot>> inbox;
  std::unique_ptr<silent::ProtocolInstance> proto;
  int input{0};
  int confidence{0};
  LocalTime joined_at{};
  LocalTime last_progress{};
  std::int64_t bits_sent{0};
  bool terminated{false};
  std::optional<int> output;
  sim::EndReason reason{sim::EndReason::kNormal};

  bool nontrivial() const { return proto && proto->nontrivial(); }
};

/// Side effects of one handler: frames to send and records to trace.
struct Effects {
  std::vector<std::pair<NodeId, RoundMsg>> sends;
  std::vector<sim::TraceEvent> records;
};

class RoundRunner {
 public:
  RoundRunner(const Constants& c, NodeId self, std::shared_ptr<const silent::Protocol> protocol,
              std::int64_t header_bits);

  /// Starts simulating an instance. Joining a known label does nothing.
  bool join(const InstanceLabel& label, int input, int confidence, LocalTime now, Effects& fx);

  void on_round_msg(NodeId from, const RoundMsg& msg, LocalTime now, Effects& fx);

  /// Crosses every due threshold and applies the stall rule.
  void on_wake(LocalTime now, Effects& fx);

  std::optional<LocalTime> next_wake(LocalTime now) const;

  /// Deletes states joined longer than the instance lifetime ago or in the future.
  int gc(LocalTime now);
  void wipe() { states_.clear(); }

  std::map<InstanceLabel, RoundState>& states() { return states_; }
  const std::map<InstanceLabel, RoundState>& states() const { return states_; }

  /// Builds an empty state with the right shape, for corruption generators.
  RoundState blank_state(const InstanceLabel& label) const;

 private:
  void store(RoundState& st, NodeId from, int round, const std::optional<Payload>& payload, LocalTime now,
             Effects& fx);
  void advance(RoundState& st, LocalTime now, Effects& fx);
  LocalTime stall_budget(const RoundState& st) const;
  void cross(RoundState& st, int round, LocalTime now, Effects& fx);
  void terminate(RoundState& st, int output, sim::EndReason reason, Effects& fx);
  sim::TraceEvent record(sim::TraceKind kind, const RoundState& st) const;

  Constants c_;
  NodeId self_;
  int n_;
  int rounds_;
  std::shared_ptr<const silent::Protocol> protocol_;
  std::int64_t header_bits_;
  std::map<InstanceLabel, RoundState> states_;
};

}  // namespace nic::rounds
