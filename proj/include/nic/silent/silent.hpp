#pragma once

#include <memory>

#include "nic/silent/protocol.hpp"

namespace nic::silent {

/// Wraps a protocol so that all-zero inputs produce no messages at all.
///
/// Two leading rounds broadcast the input bit when it is 1; a node that sees
/// fewer than n-f ones drops its input to 0, and only nodes that saw at
/// least f+1 ones in the first round run the inner protocol.
class SilentProtocol final : public Protocol {
 public:
  explicit SilentProtocol(std::shared_ptr<const Protocol> inner);

  int rounds() const override { return inner_->rounds() + 2; }
  std::int64_t bit_bound() const override { return inner_->bit_bound() + 2 * n(); }
  std::unique_ptr<ProtocolInstance> start(NodeId self, int input) const override;
  std::string name() const override { return "silent(" + inner_->name() + ")"; }

  const Protocol& inner() const { return *inner_; }

 private:
  std::shared_ptr<const Protocol> inner_;
};

/// Read-only view of a wrapper instance's bookkeeping.
struct SilentView {
  int input{0};
  int r1{0};
  int r2{0};
  bool inner_active{false};
  bool aborted{false};
  std::int64_t bits_sent{0};
};

/// Returns the bookkeeping of an instance created by SilentProtocol.
std::optional<SilentView> inspect(const ProtocolInstance& inst);

}  // namespace nic::silent
