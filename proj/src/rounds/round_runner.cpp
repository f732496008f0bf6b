#include "nic/rounds/round_runner.hpp"

namespace nic::rounds {

using sim::EndReason;
using sim::TraceEvent;
using sim::TraceKind;

RoundRunner::RoundRunner(const Constants& c, NodeId self, std::shared_ptr<const silent::Protocol> protocol,
                         std::int64_t header_bits)
    : c_(c), self_(self), n_(c.params.n), rounds_(protocol->rounds()), protocol_(std::move(protocol)),
      header_bits_(header_bits) {
  if (rounds_ != c.params.rounds) throw ModelError("round runner: protocol round count differs from parameters");
}

RoundState RoundRunner::blank_state(const InstanceLabel& label) const {
  RoundState st;
  st.label = label;
  st.thresholds.assign(static_cast<std::size_t>(rounds_) + 2, std::nullopt);
  st.inbox.assign(static_cast<std::size_t>(rounds_) + 1, std::vector<Slot>(static_cast<std::size_t>(n_)));
  return st;
}

TraceEvent RoundRunner::record(TraceKind kind, const RoundState& st) const {
  TraceEvent ev;
  ev.kind = kind;
  ev.label = st.label;
  return ev;
}

bool RoundRunner::join(const InstanceLabel& label, int input, int confidence, LocalTime now, Effects& fx) {
  if (states_.count(label)) return false;
  RoundState st = blank_state(label);
  st.input = input;
  st.confidence = confidence;
  st.joined_at = now;
  st.thresholds[1] = now + c_.start_delay;
  st.last_progress = *st.thresholds[1];
  st.proto = protocol_->start(self_, input);
  TraceEvent ev = record(TraceKind::kJoin, st);
  ev.value = input;
  ev.aux = confidence;
  ev.a = st.thresholds[1]->units;
  fx.records.push_back(ev);
  states_.emplace(label, std::move(st));
  return true;
}

void RoundRunner::store(RoundState& st, NodeId from, int round, const std::optional<Payload>& payload, LocalTime now,
                        Effects& fx) {
  auto& slots = st.inbox[static_cast<std::size_t>(round)];
  Slot& slot = slots[static_cast<std::size_t>(from)];
  if (slot.stored) {
    TraceEvent ev = record(TraceKind::kDrop, st);
    ev.peer = from;
    ev.round = round;
    ev.msg = MsgKind::kRound;
    ev.aux = static_cast<std::int32_t>(sim::DropReason::kDuplicate);
    fx.records.push_back(ev);
    return;
  }
  slot.stored = true;
  slot.payload = payload;
  TraceEvent ev = record(TraceKind::kStore, st);
  ev.peer = from;
  ev.round = round;
  ev.payload = sim::PayloadCell::of(payload);
  fx.records.push_back(ev);

  int count = 0;
  for (const auto& s : slots) count += s.stored ? 1 : 0;
  auto& next = st.thresholds[static_cast<std::size_t>(round) + 1];
  if (count >= n_ - c_.params.f && !next) next = now + c_.round_gap;
  auto& cur = st.thresholds[static_cast<std::size_t>(round)];
  if (count >= c_.params.f + 1 && (!cur || *cur > now)) cur = now;
}

void RoundRunner::on_round_msg(NodeId from, const RoundMsg& msg, LocalTime now, Effects& fx) {
  auto drop = [&](sim::DropReason why) {
    TraceEvent ev;
    ev.kind = TraceKind::kDrop;
    ev.msg = MsgKind::kRound;
    ev.label = msg.label;
    ev.peer = from;
    ev.round = msg.round;
    ev.aux = static_cast<std::int32_t>(why);
    fx.records.push_back(ev);
  };
  auto it = states_.find(msg.label);
  if (it == states_.end() || it->second.terminated) return drop(sim::DropReason::kUnknownInstance);
  if (msg.round < 1 || msg.round > rounds_) return drop(sim::DropReason::kBadRound);
  if (from < 0 || from >= n_) return drop(sim::DropReason::kMalformed);
  store(it->second, from, msg.round, msg.payload, now, fx);
  advance(it->second, now, fx);
}

void RoundRunner::terminate(RoundState& st, int output, EndReason reason, Effects& fx) {
  st.terminated = true;
  st.output = output;
  st.reason = reason;
  TraceEvent ev = record(TraceKind::kOutput, st);
  ev.value = output;
  ev.aux = static_cast<std::int32_t>(reason);
  ev.round = st.next_round - 1;
  ev.a = st.input;
  fx.records.push_back(ev);
}

void RoundRunner::cross(RoundState& st, int round, LocalTime now, Effects& fx) {
  st.next_round = round + 1;
  st.last_progress = now;
  TraceEvent ev = record(TraceKind::kCross, st);
  ev.round = round;
  fx.records.push_back(ev);

  auto inbox_of = [&](int r) {
    silent::Inbox in(static_cast<std::size_t>(n_));
    const auto& slots = st.inbox[static_cast<std::size_t>(r)];
    for (NodeId u = 0; u < n_; ++u)
      if (slots[u].stored) in[u] = slots[u].payload;
    return in;
  };

  if (round > 1) st.proto->receive(round - 1, inbox_of(round - 1));
  if (round == rounds_ + 1) {
    terminate(st, st.proto->output(), EndReason::kNormal, fx);
    return;
  }

  silent::Outbox out = st.proto->send(round);
  out.resize(static_cast<std::size_t>(n_));
  std::int64_t bits = 0;
  for (NodeId w = 0; w < n_; ++w)
    if (w != self_) bits += header_bits_ + static_cast<std::int64_t>(out[w] ? out[w]->size() : 0);
  if (st.bits_sent + bits > c_.instance_budget(round)) {
    terminate(st, 0, EndReason::kAbort, fx);
    return;
  }
  st.bits_sent += bits;
  for (NodeId w = 0; w < n_; ++w) {
    if (w == self_) continue;
    fx.sends.emplace_back(w, RoundMsg{st.label, round, out[w]});
  }
  store(st, self_, round, out[self_], now, fx);
}

void RoundRunner::advance(RoundState& st, LocalTime now, Effects& fx) {
  if (st.terminated) return;
  if (!st.proto || st.next_round < 1 || st.thresholds.size() != static_cast<std::size_t>(rounds_) + 2 ||
      st.inbox.size() != static_cast<std::size_t>(rounds_) + 1) {
    terminate(st, 0, EndReason::kAbort, fx);
    return;
  }
  while (!st.terminated && st.next_round <= rounds_ + 1) {
    const auto& h = st.thresholds[static_cast<std::size_t>(st.next_round)];
    if (!h || *h > now) break;
    cross(st, st.next_round, now, fx);
  }
  if (!st.terminated && (st.last_progress > now + c_.start_delay || now - st.last_progress >= stall_budget(st)))
    terminate(st, 0, EndReason::kStall, fx);
}

LocalTime RoundRunner::stall_budget(const RoundState& st) const {
  // Nodes cross round 1 as far apart as they joined.
  return st.next_round <= 2 ? c_.stall + c_.join_slack : c_.stall;
}

void RoundRunner::on_wake(LocalTime now, Effects& fx) {
  for (auto& [label, st] : states_) advance(st, now, fx);
}

std::optional<LocalTime> RoundRunner::next_wake(LocalTime now) const {
  std::optional<LocalTime> best;
  auto consider = [&](LocalTime t) {
    if (t <= now) t = now;
    if (!best || t < *best) best = t;
  };
  for (const auto& [label, st] : states_) {
    if (st.terminated) continue;
    if (st.next_round <= rounds_ + 1)
      if (const auto& h = st.thresholds[static_cast<std::size_t>(st.next_round)]) consider(*h);
    consider(st.last_progress + stall_budget(st));
  }
  return best;
}

int RoundRunner::gc(LocalTime now) {
  int removed = 0;
  for (auto it = states_.begin(); it != states_.end();) {
    const LocalTime j = it->second.joined_at;
    if (j > now || now - j > c_.instance_ttl) {
      it = states_.erase(it);
      ++removed;
    } else {
      ++it;
    }
  }
  return removed;
}

}  // namespace nic::rounds
