#pragma once

#include <map>
#include <optional>
#include <vector>

#include "nic/constants.hpp"
#include "nic/timeout.hpp"

namespace nic::init {

/// Echoes seen for one label plus the delay timeout that turns them into a
/// participation decision.
struct EchoEntry {
  std::map<NodeId, LocalTime> stored;  // sender -> local storage time
  Timeout wait;
  bool pending{false};  // wait was reset and has not been acted on yet
};

struct InitiationState {
  std::optional<LocalTime> last_initiation;
  std::vector<std::optional<LocalTime>> last_init_from;
  std::map<InstanceLabel, EchoEntry> echoes;
};

enum class InitVerdict { kEcho, kNoTrust, kOutOfTolerance, kRateLimited };
enum class EchoVerdict { kStored, kStoredAndArmed, kDuplicate, kOutOfTolerance };

struct Participation {
  InstanceLabel label;
  int confidence{0};  // 2: real input, 1: input 0, 0: ignore
  int echoes{0};
};

class Initiation {
 public:
  Initiation(const Constants& c, NodeId self);

  /// Returns the stamp to broadcast, or nullopt when the local rate limit
  /// refuses the initiation.
  std::optional<Stamp> initiate(LocalTime now);

  InitVerdict on_init(NodeId from, Stamp stamp, std::optional<Stamp> estimate, LocalTime now);
  EchoVerdict on_echo(NodeId from, const InstanceLabel& label, std::optional<Stamp> estimate, LocalTime now);

  /// Decisions for every armed timeout that has expired by `now`.
  std::vector<Participation> take_expired(LocalTime now);

  /// Earliest local time at which an armed timeout expires.
  std::optional<LocalTime> next_expiry(LocalTime now) const;

  /// Drops echo tuples older than the echo lifetime or stamped in the future.
  int gc(LocalTime now);

  /// Forgets every echo and forces all delay timeouts expired.
  void wipe();

  InitiationState& state() { return st_; }
  const InitiationState& state() const { return st_; }

 private:
  Constants c_;
  NodeId self_;
  InitiationState st_;
};

}  // namespace nic::init
