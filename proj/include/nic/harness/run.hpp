#pragma once

#include <memory>

#include "nic/harness/scenario.hpp"
#include "nic/node/node.hpp"
#include "nic/sim/kernel.hpp"

namespace nic::harness {

/// Deterministic input oracle. Each label falls into one of three classes:
/// every node inputs 1 (30%), every node inputs 0 (30%), or each node draws
/// its own bit (40%).
node::InputOracle make_oracle(std::uint64_t seed);

std::shared_ptr<const silent::Protocol> make_protocol(const Scenario& s);

struct RunResult {
  Scenario scenario;
  Resolved resolved;
  sim::Trace trace;
  double stabilization{0};  // S in d
};

RunResult run_scenario(const Scenario& s);

/// Overwrites every correct node's state with random content and queues
/// random channel garbage. Must be called before the kernel starts.
void corrupt(sim::Kernel& kernel, const Resolved& r, const silent::Protocol& protocol, std::uint64_t seed);

}  // namespace nic::harness
