#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nic/payload.hpp"
#include "nic/units.hpp"

namespace nic::silent {

/// Messages received in one round, indexed by sender; nullopt means nothing
/// arrived (or an explicit non-message).
using Inbox = std::vector<std::optional<Payload>>;
/// Messages to send in one round, indexed by receiver.
using Outbox = std::vector<std::optional<Payload>>;

std::int64_t outbox_bits(const Outbox& out);

/// One node's run of a synchronous protocol. Rounds are numbered from 1.
/// Per round the driver calls send(r) and then receive(r, inbox).
class ProtocolInstance {
 public:
  virtual ~ProtocolInstance() = default;

  virtual Outbox send(int round) = 0;
  virtual void receive(int round, const Inbox& inbox) = 0;
  virtual int output() const = 0;

  /// True once the instance does anything beyond staying silent.
  virtual bool nontrivial() const { return true; }

  virtual std::unique_ptr<ProtocolInstance> clone() const = 0;
  /// Canonical encoding of the full state, used to merge equal states.
  virtual std::string fingerprint() const = 0;
};

/// A deterministic synchronous binary consensus protocol.
class Protocol {
 public:
  Protocol(int n, int f) : n_(n), f_(f) {}
  virtual ~Protocol() = default;

  int n() const { return n_; }
  int f() const { return f_; }

  virtual int rounds() const = 0;
  /// Upper bound on the payload bits a correct node sends in one run.
  virtual std::int64_t bit_bound() const = 0;
  virtual std::unique_ptr<ProtocolInstance> start(NodeId self, int input) const = 0;
  virtual std::string name() const = 0;

 private:
  int n_;
  int f_;
};

}  // namespace nic::silent
