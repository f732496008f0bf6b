#pragma once

#include <functional>
#include <memory>

#include "nic/clock/estimates.hpp"
#include "nic/guard/guard.hpp"
#include "nic/init/initiation.hpp"
#include "nic/rounds/round_runner.hpp"
#include "nic/sim/process.hpp"

namespace nic::node {

/// Input a node contributes to an instance it joins with full confidence.
using InputOracle = std::function<int(NodeId self, const InstanceLabel& label)>;

/// A correct node: clock estimates, initiation, round simulation and the
/// stabilization guard wired onto the kernel's event interface.
class CorrectNode final : public sim::Process {
 public:
  CorrectNode(const Constants& c, NodeId self, std::shared_ptr<const silent::Protocol> protocol,
              InputOracle oracle);

  void on_start(sim::NodeContext& ctx) override;
  void on_deliver(sim::NodeContext& ctx, NodeId from, const Message& msg) override;
  void on_wake(sim::NodeContext& ctx, LocalTime value) override;
  void on_command(sim::NodeContext& ctx, const sim::Command& cmd) override;
  std::optional<Stamp> probe_estimate(NodeId w, LocalTime now) const override { return clock_.estimate(w, now); }

  clock::ClockEstimates& clock() { return clock_; }
  init::Initiation& initiation() { return init_; }
  rounds::RoundRunner& runner() { return runner_; }
  guard::Quarantine& quarantine() { return quarantine_; }
  const guard::BitLedger& bits() const { return ledger_; }
  int quarantines() const { return quarantines_; }

 private:
  void handle_init(sim::NodeContext& ctx, NodeId from, Stamp stamp, LocalTime now);
  void handle_echo(sim::NodeContext& ctx, NodeId from, const InstanceLabel& label, LocalTime now);
  void tick(sim::NodeContext& ctx, LocalTime now);
  void check_overload(sim::NodeContext& ctx, NodeId initiator, LocalTime now);
  void settle(sim::NodeContext& ctx);
  void flush(sim::NodeContext& ctx, rounds::Effects& fx, LocalTime now);
  void send(sim::NodeContext& ctx, NodeId to, Message msg);
  void drop(sim::NodeContext& ctx, MsgKind kind, NodeId from, sim::DropReason why, const InstanceLabel& label = {});

  Constants c_;
  NodeId self_;
  InputOracle oracle_;
  WireFormat wire_;
  clock::ClockEstimates clock_;
  init::Initiation init_;
  rounds::RoundRunner runner_;
  guard::Quarantine quarantine_;
  guard::BitLedger ledger_;
  LocalTime next_tick_{};
  int quarantines_{0};
};

}  // namespace nic::node
