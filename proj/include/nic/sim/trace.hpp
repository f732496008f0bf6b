#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nic/messages.hpp"
#include "nic/payload.hpp"
#include "nic/units.hpp"

namespace nic::sim {

enum class TraceKind : std::uint8_t {
  kSend,
  kDeliver,
  kDrop,
  kInitiate,
  kRefuse,
  kJoin,
  kCross,
  kStore,
  kOutput,
  kQuarantine,
  kWipe,
  kGc,
  kMark,
  kProbe,
  kClock,
};

const char* trace_kind_name(TraceKind k);
std::optional<TraceKind> parse_trace_kind(const std::string& s);

/// Why an instance terminated.
enum class EndReason : std::int32_t { kNormal = 0, kStall = 1, kAbort = 2, kWipe = 3 };

/// Reason codes for kDrop and kMark records.
enum class DropReason : std::int32_t {
  kMalformed = 1,
  kNoTrust = 2,
  kOutOfTolerance = 3,
  kRateLimited = 4,
  kUnknownInstance = 5,
  kBadRound = 6,
  kDuplicate = 7,
  kQuarantined = 8,
  kUnreachableExpiry = 9,
  kOverload = 10,
};

/// Payload snapshot small enough to live inline in a trace record. Payloads
/// longer than 64 bits keep only their length and a hash.
struct PayloadCell {
  bool present{false};
  std::uint16_t length{0};
  std::uint64_t bits{0};

  static PayloadCell of(const std::optional<Payload>& p);
  std::optional<Payload> restore() const;
  bool operator==(const PayloadCell&) const = default;
};

struct TraceEvent {
  RealTime time{};
  NodeId node{-1};
  TraceKind kind{TraceKind::kMark};
  MsgKind msg{MsgKind::kUpdate};
  NodeId peer{-1};
  std::uint64_t envelope{0};
  std::uint32_t bits{0};
  InstanceLabel label{};
  std::int32_t round{0};
  std::int32_t value{0};
  std::int32_t aux{0};
  std::int64_t a{0};
  std::int64_t b{0};
  std::uint64_t digest{0};
  PayloadCell payload{};

  bool operator==(const TraceEvent&) const = default;
};

/// Renders one record as `time | node | kind | payload-digest | bits`, where
/// the payload-digest column is a canonical key=value list.
std::string format_event(const TraceEvent& ev);
TraceEvent parse_event(const std::string& line);

using Trace = std::vector<TraceEvent>;

void write_trace(std::ostream& os, const Trace& trace);
Trace read_trace(std::istream& is);

/// FNV-1a over the formatted trace; equal traces give equal digests.
std::uint64_t trace_digest(const Trace& trace);

std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 1469598103934665603ULL);

}  // namespace nic::sim
