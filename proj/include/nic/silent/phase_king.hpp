#pragma once

#include "nic/silent/protocol.hpp"

namespace nic::silent {

/// Binary king protocol: f+1 phases of three rounds (value, proposal, king).
/// The king of phase p is node p. Payloads are single bits.
class PhaseKing final : public Protocol {
 public:
  PhaseKing(int n, int f);

  int rounds() const override { return 3 * (f() + 1); }
  std::int64_t bit_bound() const override { return static_cast<std::int64_t>(rounds()) * n(); }
  std::unique_ptr<ProtocolInstance> start(NodeId self, int input) const override;
  std::string name() const override { return "phase-king"; }
};

}  // namespace nic::silent
