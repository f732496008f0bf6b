#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nic/constants.hpp"
#include "nic/payload.hpp"
#include "nic/units.hpp"

namespace nic {

enum class MsgKind : std::uint8_t { kUpdate = 1, kInit = 2, kEcho = 3, kRound = 4 };

/// A node's periodic report of every clock it trusts; nullopt is the
/// "no trusted value" marker.
struct UpdateMsg {
  std::vector<std::optional<Stamp>> entries;
};

struct InitMsg {
  Stamp stamp;
};

struct EchoMsg {
  InstanceLabel label;
};

/// A simulated-round frame. A missing payload is the explicit non-message.
struct RoundMsg {
  InstanceLabel label;
  int round{1};
  std::optional<Payload> payload;
};

using Message = std::variant<UpdateMsg, InitMsg, EchoMsg, RoundMsg>;

MsgKind kind_of(const Message& m);
const char* kind_name(MsgKind k);

/// Encoded sizes used for bit accounting.
///
///   update: tag(3) + n x (presence(1) + stamp)
///   init:   tag(3) + stamp
///   echo:   tag(3) + initiator id + stamp
///   round:  tag(3) + initiator id + stamp + round + presence(1) + payload
class WireFormat {
 public:
  explicit WireFormat(const Constants& c)
      : stamp_bits_(c.stamp_bits), id_bits_(c.id_bits), round_bits_(c.round_bits) {}

  std::uint32_t bits(const Message& m) const;
  std::uint32_t round_header_bits() const {
    return static_cast<std::uint32_t>(3 + id_bits_ + stamp_bits_ + round_bits_ + 1);
  }

 private:
  int stamp_bits_;
  int id_bits_;
  int round_bits_;
};

/// Compact textual rendering of a message body used in trace records.
std::string describe(const Message& m);

}  // namespace nic
