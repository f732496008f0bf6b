#include "nic/messages.hpp"

#include <sstream>

namespace nic {

MsgKind kind_of(const Message& m) {
  return std::visit(
      [](const auto& v) -> MsgKind {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, UpdateMsg>) return MsgKind::kUpdate;
        else if constexpr (std::is_same_v<T, InitMsg>) return MsgKind::kInit;
        else if constexpr (std::is_same_v<T, EchoMsg>) return MsgKind::kEcho;
        else return MsgKind::kRound;
      },
      m);
}

const char* kind_name(MsgKind k) {
  switch (k) {
    case MsgKind::kUpdate: return "update";
    case MsgKind::kInit: return "init";
    case MsgKind::kEcho: return "echo";
    case MsgKind::kRound: return "round";
  }
  return "?";
}

std::uint32_t WireFormat::bits(const Message& m) const {
  return std::visit(
      [this](const auto& v) -> std::uint32_t {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, UpdateMsg>) {
          return static_cast<std::uint32_t>(3 + v.entries.size() * (1 + stamp_bits_));
        } else if constexpr (std::is_same_v<T, InitMsg>) {
          return static_cast<std::uint32_t>(3 + stamp_bits_);
        } else if constexpr (std::is_same_v<T, EchoMsg>) {
          return static_cast<std::uint32_t>(3 + id_bits_ + stamp_bits_);
        } else {
          return round_header_bits() + static_cast<std::uint32_t>(v.payload ? v.payload->size() : 0);
        }
      },
      m);
}

std::string describe(const Message& m) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, UpdateMsg>) {
          os << '[';
          for (std::size_t i = 0; i < v.entries.size(); ++i) {
            if (i) os << ',';
            if (v.entries[i]) os << v.entries[i]->value;
            else os << '_';
          }
          os << ']';
        } else if constexpr (std::is_same_v<T, InitMsg>) {
          os << v.stamp.value;
        } else if constexpr (std::is_same_v<T, EchoMsg>) {
          os << to_string(v.label);
        } else {
          os << to_string(v.label) << '#' << v.round << ':' << (v.payload ? v.payload->to_string() : "-");
        }
      },
      m);
  return os.str();
}

}  // namespace nic
