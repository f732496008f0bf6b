#include "nic/sim/kernel.hpp"

#include <algorithm>
#include <string>

namespace nic::sim {

bool Event::before(const Event& o) const {
  if (time != o.time) return time < o.time;
  if (kind != o.kind) return kind < o.kind;
  if (node != o.node) return node < o.node;
  if (aux != o.aux) return aux < o.aux;
  return seq < o.seq;
}

namespace {
struct HeapOrder {
  bool operator()(const Event& a, const Event& b) const { return b.before(a); }
};
}  // namespace

class Kernel::Context final : public NodeContext {
 public:
  Context(Kernel& k, NodeId self) : k_(k), self_(self), now_(k.local_clock(self, k.now_)) {}

  NodeId self() const override { return self_; }
  int n() const override { return k_.config_.n; }
  LocalTime now() const override { return now_; }

  void send(NodeId to, Message msg) override {
    step();
    k_.send_from(self_, to, std::move(msg), std::nullopt);
  }
  void send_with_delay(NodeId to, Message msg, RealTime delay) override {
    step();
    if (k_.process(self_).correct()) throw ModelError("correct nodes cannot choose message delays");
    k_.send_from(self_, to, std::move(msg), delay);
  }
  void wake_at(LocalTime value) override {
    step();
    if (value <= now_) throw ModelError("wake_at: value " + std::to_string(value.units) + " already passed");
    k_.push_threshold(self_, value);
  }
  void record(TraceEvent ev) override {
    step();
    ev.time = k_.now_;
    ev.node = self_;
    k_.trace_.push_back(ev);
  }

 private:
  void step() {
    if (++steps_ > k_.config_.step_budget) throw ModelError("handler exceeded its step budget");
  }
  Kernel& k_;
  NodeId self_;
  LocalTime now_;
  std::uint64_t steps_{0};
};

Kernel::Kernel(KernelConfig config, std::vector<HardwareClock> clocks,
               std::vector<std::unique_ptr<Process>> processes, WireFormat wire)
    : config_(std::move(config)),
      clocks_(std::move(clocks)),
      processes_(std::move(processes)),
      wire_(wire),
      rng_(config_.seed),
      pending_thresholds_(static_cast<std::size_t>(config_.n)) {
  if (static_cast<int>(clocks_.size()) != config_.n || static_cast<int>(processes_.size()) != config_.n)
    throw ModelError("kernel: need exactly n clocks and n processes");
  if (!config_.delay) config_.delay = uniform_delay();
}

void Kernel::push(Event e) {
  e.seq = next_seq_++;
  queue_.push_back(std::move(e));
  std::push_heap(queue_.begin(), queue_.end(), HeapOrder{});
}

Event Kernel::pop() {
  std::pop_heap(queue_.begin(), queue_.end(), HeapOrder{});
  Event e = std::move(queue_.back());
  queue_.pop_back();
  return e;
}

void Kernel::schedule(Event event) {
  if (event.time < now_)
    throw ModelError("schedule: event at " + std::to_string(event.time.ticks) + " is before now " +
                     std::to_string(now_.ticks));
  push(std::move(event));
}

LocalTime Kernel::local_clock(NodeId node, RealTime t) const {
  return clocks_.at(static_cast<std::size_t>(node)).at(t);
}

void Kernel::push_threshold(NodeId node, LocalTime value) {
  auto& pending = pending_thresholds_[static_cast<std::size_t>(node)];
  if (!pending.insert(value.units).second) return;
  Event e;
  e.time = clocks_[static_cast<std::size_t>(node)].first_reaching(value);
  e.kind = EventKind::kThreshold;
  e.node = node;
  e.aux = value.units;
  push(std::move(e));
}

void Kernel::set_threshold(NodeId node, LocalTime value) {
  if (value <= local_clock(node, now_))
    throw ModelError("set_threshold: local value already reached");
  push_threshold(node, value);
}

void Kernel::inject_garbage(NodeId from, NodeId to, Message msg, RealTime deliver_at) {
  if (started_ || now_ != RealTime{0}) throw ModelError("initial channel contents must be injected at time 0");
  if (deliver_at <= RealTime{0} || deliver_at >= RealTime{kTicksPerD})
    throw ModelError("initial garbage must be delivered strictly within (0, d)");
  Event e;
  e.time = deliver_at;
  e.kind = EventKind::kDelivery;
  e.node = to;
  e.from = from;
  e.aux = static_cast<std::int64_t>(next_envelope_++);
  e.msg = std::make_shared<const Message>(std::move(msg));
  e.garbage = true;
  push(std::move(e));
}

void Kernel::command(NodeId node, RealTime at, Command cmd) {
  Event e;
  e.time = at;
  e.kind = EventKind::kCommand;
  e.node = node;
  e.command = cmd;
  schedule(std::move(e));
}

void Kernel::start() {
  if (started_) return;
  started_ = true;
  if (config_.probe_period.ticks > 0) {
    Event e;
    e.time = RealTime{0};
    e.kind = EventKind::kProbe;
    e.node = 0;
    push(std::move(e));
  }
  for (NodeId v = 0; v < config_.n; ++v) {
    Context ctx(*this, v);
    process(v).on_start(ctx);
  }
}

void Kernel::send_from(NodeId from, NodeId to, Message msg, std::optional<RealTime> forced_delay) {
  if (to < 0 || to >= config_.n) throw ModelError("send: no such node " + std::to_string(to));
  auto shared = std::make_shared<const Message>(std::move(msg));
  const RealTime delay = forced_delay ? *forced_delay : config_.delay(from, to, *shared, now_, rng_);
  if (delay <= RealTime{0} || delay >= RealTime{kTicksPerD})
    throw ModelError("delay outside the open interval (0, d)");
  const std::uint64_t env = next_envelope_++;

  TraceEvent ev;
  ev.time = now_;
  ev.node = from;
  ev.kind = TraceKind::kSend;
  ev.msg = kind_of(*shared);
  ev.peer = to;
  ev.envelope = env;
  ev.bits = wire_.bits(*shared);
  if (const auto* r = std::get_if<RoundMsg>(shared.get())) {
    ev.label = r->label;
    ev.round = r->round;
    ev.payload = PayloadCell::of(r->payload);
  } else if (const auto* e = std::get_if<EchoMsg>(shared.get())) {
    ev.label = e->label;
  } else if (const auto* i = std::get_if<InitMsg>(shared.get())) {
    ev.a = i->stamp.value;
  } else {
    ev.digest = fnv1a(describe(*shared));
  }
  trace_.push_back(ev);

  Event e;
  e.time = now_ + delay;
  e.kind = EventKind::kDelivery;
  e.node = to;
  e.from = from;
  e.aux = static_cast<std::int64_t>(env);
  e.msg = std::move(shared);
  push(std::move(e));
}

void Kernel::deliver(NodeId from, NodeId to, std::shared_ptr<const Message> msg, std::uint64_t env, bool garbage) {
  if (!config_.record_update_deliveries && !garbage && std::holds_alternative<UpdateMsg>(*msg)) {
    Context ctx(*this, to);
    process(to).on_deliver(ctx, from, *msg);
    return;
  }
  TraceEvent ev;
  ev.time = now_;
  ev.node = to;
  ev.kind = TraceKind::kDeliver;
  ev.msg = kind_of(*msg);
  ev.peer = from;
  ev.envelope = env;
  ev.bits = wire_.bits(*msg);
  ev.value = garbage ? 1 : 0;
  if (const auto* r = std::get_if<RoundMsg>(msg.get())) {
    ev.label = r->label;
    ev.round = r->round;
    ev.payload = PayloadCell::of(r->payload);
  } else if (const auto* e = std::get_if<EchoMsg>(msg.get())) {
    ev.label = e->label;
  } else if (const auto* i = std::get_if<InitMsg>(msg.get())) {
    ev.a = i->stamp.value;
  } else {
    ev.digest = fnv1a(describe(*msg));
  }
  trace_.push_back(ev);
  Context ctx(*this, to);
  process(to).on_deliver(ctx, from, *msg);
}

void Kernel::run_probe() {
  for (NodeId v = 0; v < config_.n; ++v) {
    TraceEvent ev;
    ev.time = now_;
    ev.node = v;
    ev.kind = TraceKind::kClock;
    ev.a = local_clock(v, now_).units;
    trace_.push_back(ev);
  }
  for (NodeId v = 0; v < config_.n; ++v) {
    const Process& p = process(v);
    if (!p.correct()) continue;
    const LocalTime hv = local_clock(v, now_);
    for (NodeId w = 0; w < config_.n; ++w) {
      if (w == v) continue;
      TraceEvent ev;
      ev.time = now_;
      ev.node = v;
      ev.kind = TraceKind::kProbe;
      ev.peer = w;
      const auto est = p.probe_estimate(w, hv);
      ev.value = est ? 1 : 0;
      ev.a = est ? est->value : 0;
      ev.b = local_clock(w, now_).units;
      trace_.push_back(ev);
    }
  }
  Event e;
  e.time = now_ + config_.probe_period;
  e.kind = EventKind::kProbe;
  e.node = 0;
  push(std::move(e));
}

void Kernel::dispatch(const Event& e) {
  switch (e.kind) {
    case EventKind::kThreshold: {
      pending_thresholds_[static_cast<std::size_t>(e.node)].erase(e.aux);
      Context ctx(*this, e.node);
      process(e.node).on_wake(ctx, LocalTime{e.aux});
      break;
    }
    case EventKind::kDelivery:
      deliver(e.from, e.node, e.msg, static_cast<std::uint64_t>(e.aux), e.garbage);
      break;
    case EventKind::kCommand: {
      Context ctx(*this, e.node);
      process(e.node).on_command(ctx, e.command);
      break;
    }
    case EventKind::kProbe:
      run_probe();
      break;
  }
}

void Kernel::run_until(RealTime deadline) {
  if (deadline < now_) throw ModelError("run_until: deadline in the past");
  if (!started_) start();
  while (!queue_.empty() && queue_.front().time <= deadline) {
    Event e = pop();
    now_ = e.time;
    dispatch(e);
  }
  now_ = deadline;
}

DelayPolicy uniform_delay() {
  return [](NodeId, NodeId, const Message&, RealTime, Rng& rng) {
    constexpr std::int64_t eps = kTicksPerD / 64;
    std::uniform_int_distribution<std::int64_t> dist(eps, kTicksPerD - eps);
    return RealTime{dist(rng)};
  };
}

}  // namespace nic::sim
