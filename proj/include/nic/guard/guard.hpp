#pragma once

#include <map>
#include <optional>

#include "nic/constants.hpp"
#include "nic/messages.hpp"
#include "nic/rounds/round_runner.hpp"

namespace nic::guard {

enum class Verdict { kOk, kInconsistent };

struct OverloadCount {
  int active_nontrivial{0};
  int active_total{0};
};

/// Counts, for one initiator, the live nontrivial instances and the
/// instances joined within the last window T~.
OverloadCount count_instances(const Constants& c, const std::map<InstanceLabel, rounds::RoundState>& states,
                              NodeId initiator, LocalTime now);

Verdict detect_overload(const Constants& c, const std::map<InstanceLabel, rounds::RoundState>& states,
                        NodeId initiator, LocalTime now);

/// Send suppression followed by a wipe of all instance memory.
class Quarantine {
 public:
  explicit Quarantine(const Constants& c) : length_(c.quarantine) {}

  void begin(LocalTime now) { until_ = now + length_; }
  bool active(LocalTime now) const { return until_ && *until_ > now; }
  /// True once a started quarantine has run its course (or its end time is
  /// implausibly far away); the caller then wipes and calls finish().
  bool due(LocalTime now) const { return until_ && (*until_ <= now || *until_ - now > length_); }
  void finish() { until_.reset(); }
  std::optional<LocalTime> until() const { return until_; }
  void set_until(std::optional<LocalTime> t) { until_ = t; }

 private:
  LocalTime length_;
  std::optional<LocalTime> until_;
};

/// Running totals of bits sent, split into clock/initiation traffic and
/// simulated-round traffic.
struct BitLedger {
  std::int64_t infra{0};
  std::int64_t instance{0};

  void account(const Message& m, std::uint32_t bits) {
    (std::holds_alternative<RoundMsg>(m) ? instance : infra) += bits;
  }
};

}  // namespace nic::guard
