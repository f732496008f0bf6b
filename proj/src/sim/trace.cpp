#include "nic/sim/trace.hpp"

#include <array>
#include <cinttypes>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace nic::sim {

namespace {

constexpr std::array<const char*, 15> kKindNames = {
    "send", "deliver", "drop", "initiate", "refuse", "join", "cross", "store",
    "output", "quarantine", "wipe", "gc", "mark", "probe", "clock"};

std::uint64_t hash_payload(const Payload& p) { return fnv1a(p.to_string()); }

}  // namespace

std::uint64_t fnv1a(const std::string& s, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

const char* trace_kind_name(TraceKind k) { return kKindNames.at(static_cast<std::size_t>(k)); }

std::optional<TraceKind> parse_trace_kind(const std::string& s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (s == kKindNames[i]) return static_cast<TraceKind>(i);
  return std::nullopt;
}

PayloadCell PayloadCell::of(const std::optional<Payload>& p) {
  PayloadCell c;
  if (!p) return c;
  c.present = true;
  c.length = static_cast<std::uint16_t>(p->size());
  if (p->size() <= 64) {
    for (std::size_t i = 0; i < p->size(); ++i)
      if (p->bit(i)) c.bits |= (1ULL << i);
  } else {
    c.bits = hash_payload(*p);
  }
  return c;
}

std::optional<Payload> PayloadCell::restore() const {
  if (!present) return std::nullopt;
  if (length > 64) throw ModelError("payload longer than 64 bits is not restorable from a trace");
  Payload p;
  for (std::uint16_t i = 0; i < length; ++i) p.push((bits >> i) & 1ULL);
  return p;
}

std::string format_event(const TraceEvent& ev) {
  char head[64];
  std::snprintf(head, sizeof head, "%" PRId64 ".%06" PRId64, ev.time.ticks / kTicksPerD,
                (ev.time.ticks % kTicksPerD) * 1000000 / kTicksPerD);
  std::ostringstream os;
  os << head << " | " << ev.node << " | " << trace_kind_name(ev.kind) << " | ";
  os << "msg=" << static_cast<int>(ev.msg) << " peer=" << ev.peer << " env=" << ev.envelope
     << " label=" << ev.label.initiator << '@' << ev.label.stamp.value << " r=" << ev.round
     << " v=" << ev.value << " x=" << ev.aux << " a=" << ev.a << " b=" << ev.b << " dig=" << ev.digest;
  if (ev.payload.present) os << " p=" << ev.payload.length << ':' << ev.payload.bits;
  else os << " p=-";
  os << " | " << ev.bits;
  return os.str();
}

TraceEvent parse_event(const std::string& line) {
  TraceEvent ev;
  std::istringstream is(line);
  std::string time, bar, kind;
  is >> time >> bar >> ev.node >> bar >> kind >> bar;
  const auto dot = time.find('.');
  if (dot == std::string::npos || bar != "|") throw ModelError("trace: malformed line: " + line);
  const std::int64_t whole = std::stoll(time.substr(0, dot));
  const std::int64_t micro = std::stoll(time.substr(dot + 1));
  ev.time = RealTime{whole * kTicksPerD + micro * kTicksPerD / 1000000};
  auto k = parse_trace_kind(kind);
  if (!k) throw ModelError("trace: unknown kind '" + kind + "'");
  ev.kind = *k;
  std::string tok;
  while (is >> tok) {
    if (tok == "|") {
      is >> ev.bits;
      break;
    }
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ModelError("trace: malformed field '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "msg") ev.msg = static_cast<MsgKind>(std::stoi(val));
    else if (key == "peer") ev.peer = std::stoi(val);
    else if (key == "env") ev.envelope = std::stoull(val);
    else if (key == "label") {
      const auto at = val.find('@');
      ev.label.initiator = std::stoi(val.substr(0, at));
      ev.label.stamp.value = std::stoll(val.substr(at + 1));
    } else if (key == "r") ev.round = std::stoi(val);
    else if (key == "v") ev.value = std::stoi(val);
    else if (key == "x") ev.aux = std::stoi(val);
    else if (key == "a") ev.a = std::stoll(val);
    else if (key == "b") ev.b = std::stoll(val);
    else if (key == "dig") ev.digest = std::stoull(val);
    else if (key == "p") {
      if (val != "-") {
        const auto colon = val.find(':');
        ev.payload.present = true;
        ev.payload.length = static_cast<std::uint16_t>(std::stoi(val.substr(0, colon)));
        ev.payload.bits = std::stoull(val.substr(colon + 1));
      }
    } else {
      throw ModelError("trace: unknown field '" + key + "'");
    }
  }
  return ev;
}

void write_trace(std::ostream& os, const Trace& trace) {
  for (const auto& ev : trace) os << format_event(ev) << '\n';
}

Trace read_trace(std::istream& is) {
  Trace t;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    t.push_back(parse_event(line));
  }
  return t;
}

std::uint64_t trace_digest(const Trace& trace) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& ev : trace) h = fnv1a(format_event(ev), h);
  return h;
}

}  // namespace nic::sim
