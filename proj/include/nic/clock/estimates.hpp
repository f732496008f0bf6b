#pragma once

#include <optional>
#include <vector>

#include "nic/constants.hpp"
#include "nic/messages.hpp"
#include "nic/timeout.hpp"

namespace nic::clock {

/// Raw state of the estimate table. Public so corruption generators can
/// overwrite any of it.
struct EstimateState {
  // rows[u][w]: the value u last reported for w. rows[self] is the row this
  // node broadcast at its last tick.
  std::vector<std::vector<std::optional<Stamp>>> rows;
  std::vector<std::optional<LocalTime>> last_receipt;  // R_last
  std::vector<Timeout> report_hold;                     // A
  std::vector<Timeout> trust_hold;                      // B (D_B)
  // Only used by the non-stabilizing variant.
  std::vector<bool> distrusted;
  std::vector<bool> bootstrapped;
};

struct UpdateOutcome {
  bool malformed{false};
  bool timing_violation{false};
  int support_resets{0};
};

class ClockEstimates {
 public:
  ClockEstimates(const Constants& c, NodeId self);

  /// Handles a tick at local time `now` (a multiple of the tick period).
  /// Returns the row to broadcast.
  UpdateMsg on_tick(LocalTime now);

  UpdateOutcome on_update(NodeId from, const UpdateMsg& msg, LocalTime now);

  /// Estimate of w's clock, or nullopt when w is not trusted.
  std::optional<Stamp> estimate(NodeId w, LocalTime now) const;

  /// Seeds the non-stabilizing variant with every node's exact clock value
  /// at time zero, standing in for perfect initialization.
  void bootstrap(const std::vector<Stamp>& initial_clocks);

  EstimateState& state() { return st_; }
  const EstimateState& state() const { return st_; }

 private:
  bool simple() const { return c_.params.clock_algorithm == ClockAlgorithm::kSimple; }
  int support(NodeId x) const;
  void distrust(NodeId w, LocalTime now);

  Constants c_;
  NodeId self_;
  int n_;
  EstimateState st_;
};

}  // namespace nic::clock
