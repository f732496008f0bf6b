#include "nic/node/node.hpp"

namespace nic::node {

using sim::DropReason;
using sim::TraceEvent;
using sim::TraceKind;

CorrectNode::CorrectNode(const Constants& c, NodeId self, std::shared_ptr<const silent::Protocol> protocol,
                         InputOracle oracle)
    : c_(c),
      self_(self),
      oracle_(std::move(oracle)),
      wire_(c),
      clock_(c, self),
      init_(c, self),
      runner_(c, self, std::move(protocol), wire_.round_header_bits()),
      quarantine_(c) {}

void CorrectNode::send(sim::NodeContext& ctx, NodeId to, Message msg) {
  ledger_.account(msg, wire_.bits(msg));
  ctx.send(to, std::move(msg));
}

void CorrectNode::drop(sim::NodeContext& ctx, MsgKind kind, NodeId from, DropReason why, const InstanceLabel& label) {
  TraceEvent ev;
  ev.kind = TraceKind::kDrop;
  ev.msg = kind;
  ev.peer = from;
  ev.label = label;
  ev.aux = static_cast<std::int32_t>(why);
  ctx.record(ev);
}

void CorrectNode::on_start(sim::NodeContext& ctx) {
  const std::int64_t p = c_.tick_period.units;
  const LocalTime now = ctx.now();
  next_tick_ = LocalTime{(now.units / p) * p};
  if (next_tick_ < now) next_tick_ += c_.tick_period;
  settle(ctx);
}

void CorrectNode::tick(sim::NodeContext& ctx, LocalTime now) {
  const std::int64_t p = c_.tick_period.units;
  const LocalTime at{(now.units / p) * p};
  next_tick_ = at + c_.tick_period;

  UpdateMsg row = clock_.on_tick(now);
  for (NodeId w = 0; w < ctx.n(); ++w)
    if (w != self_) send(ctx, w, row);

  const int echoes = init_.gc(now);
  const int instances = runner_.gc(now);
  if (echoes + instances > 0) {
    TraceEvent ev;
    ev.kind = TraceKind::kGc;
    ev.a = echoes;
    ev.b = instances;
    ctx.record(ev);
  }
  for (NodeId v = 0; v < ctx.n(); ++v) check_overload(ctx, v, now);
}

void CorrectNode::check_overload(sim::NodeContext& ctx, NodeId initiator, LocalTime now) {
  if (quarantine_.until()) return;
  if (guard::detect_overload(c_, runner_.states(), initiator, now) == guard::Verdict::kOk) return;
  const auto k = guard::count_instances(c_, runner_.states(), initiator, now);
  quarantine_.begin(now);
  ++quarantines_;
  TraceEvent ev;
  ev.kind = TraceKind::kQuarantine;
  ev.peer = initiator;
  ev.a = k.active_nontrivial;
  ev.b = k.active_total;
  ctx.record(ev);
}

void CorrectNode::flush(sim::NodeContext& ctx, rounds::Effects& fx, LocalTime now) {
  for (auto& r : fx.records) ctx.record(r);
  if (quarantine_.active(now)) {
    if (!fx.sends.empty()) {
      TraceEvent ev;
      ev.kind = TraceKind::kMark;
      ev.aux = static_cast<std::int32_t>(DropReason::kQuarantined);
      ev.a = static_cast<std::int64_t>(fx.sends.size());
      ctx.record(ev);
    }
  } else {
    for (auto& [to, msg] : fx.sends) send(ctx, to, std::move(msg));
  }
  fx = {};
}

void CorrectNode::settle(sim::NodeContext& ctx) {
  const LocalTime now = ctx.now();
  if (next_tick_ > now + c_.tick_period) next_tick_ = now;
  if (now >= next_tick_) tick(ctx, now);

  if (quarantine_.due(now)) {
    quarantine_.finish();
    init_.wipe();
    runner_.wipe();
    TraceEvent ev;
    ev.kind = TraceKind::kWipe;
    ctx.record(ev);
  }

  rounds::Effects fx;
  for (const auto& p : init_.take_expired(now)) {
    if (p.confidence == 0) {
      TraceEvent ev;
      ev.kind = TraceKind::kMark;
      ev.label = p.label;
      ev.aux = static_cast<std::int32_t>(DropReason::kUnreachableExpiry);
      ev.value = p.echoes;
      ctx.record(ev);
      continue;
    }
    const int input = p.confidence == 2 ? oracle_(self_, p.label) : 0;
    if (runner_.join(p.label, input, p.confidence, now, fx)) {
      flush(ctx, fx, now);
      check_overload(ctx, p.label.initiator, now);
    }
  }
  runner_.on_wake(now, fx);
  flush(ctx, fx, now);

  LocalTime wake = next_tick_;
  auto consider = [&](std::optional<LocalTime> t) {
    if (t && *t > now && *t < wake) wake = *t;
  };
  consider(init_.next_expiry(now));
  consider(runner_.next_wake(now));
  consider(quarantine_.until());
  if (wake > now) ctx.wake_at(wake);
}

void CorrectNode::handle_init(sim::NodeContext& ctx, NodeId from, Stamp stamp, LocalTime now) {
  switch (init_.on_init(from, stamp, clock_.estimate(from, now), now)) {
    case init::InitVerdict::kEcho: {
      const InstanceLabel label{from, stamp};
      for (NodeId w = 0; w < ctx.n(); ++w)
        if (w != self_) send(ctx, w, EchoMsg{label});
      handle_echo(ctx, self_, label, now);
      break;
    }
    case init::InitVerdict::kNoTrust: drop(ctx, MsgKind::kInit, from, DropReason::kNoTrust); break;
    case init::InitVerdict::kOutOfTolerance: drop(ctx, MsgKind::kInit, from, DropReason::kOutOfTolerance); break;
    case init::InitVerdict::kRateLimited: drop(ctx, MsgKind::kInit, from, DropReason::kRateLimited); break;
  }
}

void CorrectNode::handle_echo(sim::NodeContext& ctx, NodeId from, const InstanceLabel& label, LocalTime now) {
  if (label.initiator < 0 || label.initiator >= ctx.n()) {
    drop(ctx, MsgKind::kEcho, from, DropReason::kMalformed, label);
    return;
  }
  switch (init_.on_echo(from, label, clock_.estimate(label.initiator, now), now)) {
    case init::EchoVerdict::kStored:
    case init::EchoVerdict::kStoredAndArmed: break;
    case init::EchoVerdict::kDuplicate: drop(ctx, MsgKind::kEcho, from, DropReason::kDuplicate, label); break;
    case init::EchoVerdict::kOutOfTolerance:
      drop(ctx, MsgKind::kEcho, from, DropReason::kOutOfTolerance, label);
      break;
  }
}

void CorrectNode::on_deliver(sim::NodeContext& ctx, NodeId from, const Message& msg) {
  const LocalTime now = ctx.now();
  if (const auto* u = std::get_if<UpdateMsg>(&msg)) {
    const auto out = clock_.on_update(from, *u, now);
    if (out.malformed) {
      drop(ctx, MsgKind::kUpdate, from, DropReason::kMalformed);
    } else if (out.timing_violation) {
      TraceEvent ev;
      ev.kind = TraceKind::kMark;
      ev.msg = MsgKind::kUpdate;
      ev.peer = from;
      ev.aux = static_cast<std::int32_t>(DropReason::kOutOfTolerance);
      ctx.record(ev);
    }
  } else if (const auto* i = std::get_if<InitMsg>(&msg)) {
    if (i->stamp.value < 0 || i->stamp.value >= c_.modulus)
      drop(ctx, MsgKind::kInit, from, DropReason::kMalformed);
    else
      handle_init(ctx, from, i->stamp, now);
  } else if (const auto* e = std::get_if<EchoMsg>(&msg)) {
    handle_echo(ctx, from, e->label, now);
  } else if (const auto* r = std::get_if<RoundMsg>(&msg)) {
    rounds::Effects fx;
    runner_.on_round_msg(from, *r, now, fx);
    flush(ctx, fx, now);
  }
  settle(ctx);
}

void CorrectNode::on_wake(sim::NodeContext& ctx, LocalTime) { settle(ctx); }

void CorrectNode::on_command(sim::NodeContext& ctx, const sim::Command& cmd) {
  if (cmd.kind != sim::Command::Kind::kInitiate) return;
  const LocalTime now = ctx.now();
  const auto stamp = init_.initiate(now);
  TraceEvent ev;
  ev.kind = stamp ? TraceKind::kInitiate : TraceKind::kRefuse;
  if (stamp) {
    ev.label = InstanceLabel{self_, *stamp};
    ev.a = stamp->value;
  }
  ctx.record(ev);
  if (stamp) {
    for (NodeId w = 0; w < ctx.n(); ++w)
      if (w != self_) send(ctx, w, InitMsg{*stamp});
    handle_init(ctx, self_, *stamp, now);
  }
  settle(ctx);
}

}  // namespace nic::node
