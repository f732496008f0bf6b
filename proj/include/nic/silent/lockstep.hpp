#pragma once

#include <functional>
#include <vector>

#include "nic/silent/protocol.hpp"

namespace nic::silent {

/// What a faulty sender delivers to `to` in `round`.
using ByzantineChoice = std::function<std::optional<Payload>(int round, NodeId from, NodeId to)>;

struct LockstepConfig {
  std::vector<int> inputs;         // per node; ignored for faulty nodes
  std::vector<bool> faulty;        // per node
  std::vector<bool> participates;  // per node; non-participants stay silent
  ByzantineChoice byzantine;       // may be empty: faulty nodes stay silent
};

struct LockstepRun {
  std::vector<std::optional<int>> outputs;     // per participating correct node
  std::vector<std::vector<Outbox>> sent;       // [round-1][node]
  std::vector<std::vector<Inbox>> received;    // [round-1][node]
  std::vector<std::int64_t> bits;              // payload bits per node
};

/// Runs the protocol in lock step over all its rounds.
LockstepRun run_lockstep(const Protocol& protocol, const LockstepConfig& config);

/// Replays one node against a fixed sequence of inboxes. Returns its
/// outboxes per round and its output.
struct NodeReplay {
  std::vector<Outbox> sent;
  int output{0};
};
NodeReplay replay_node(const Protocol& protocol, NodeId self, int input, const std::vector<Inbox>& inboxes);

struct BruteForceResult {
  std::int64_t terminal_states{0};  // distinct joint correct states at the end
  std::int64_t expanded{0};         // joint states expanded across all rounds
  std::int64_t agreement_violations{0};
  std::int64_t validity_violations{0};
};

/// Explores every assignment of `alphabet` messages from one faulty node to
/// every correct node in every round, for every faulty identity and every
/// correct input vector. Equal joint correct states are merged per round.
BruteForceResult brute_force(const Protocol& protocol, const std::vector<std::optional<Payload>>& alphabet);

}  // namespace nic::silent
