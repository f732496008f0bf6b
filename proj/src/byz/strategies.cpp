#include "nic/byz/strategies.hpp"

#include <algorithm>
#include <set>

namespace nic::byz {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kCrash: return "crash";
    case Strategy::kEquivocate: return "equivocate";
    case Strategy::kSplitEcho: return "split-echo";
    case Strategy::kClockLiar: return "clock-liar";
    case Strategy::kSpam: return "spam";
  }
  return "?";
}

std::vector<Strategy> all_strategies() {
  return {Strategy::kCrash, Strategy::kEquivocate, Strategy::kSplitEcho, Strategy::kClockLiar, Strategy::kSpam};
}

std::optional<Strategy> parse_strategy(const std::string& s) {
  for (auto k : all_strategies())
    if (s == strategy_name(k)) return k;
  return std::nullopt;
}

Conditions conditions_for(Strategy s) {
  switch (s) {
    case Strategy::kCrash: return {DelayKind::kUniform, RateKind::kConstant};
    case Strategy::kEquivocate: return {DelayKind::kFastSlow, RateKind::kDrifting};
    case Strategy::kSplitEcho: return {DelayKind::kBoundary, RateKind::kExtreme};
    case Strategy::kClockLiar: return {DelayKind::kUniform, RateKind::kExtreme};
    case Strategy::kSpam: return {DelayKind::kSkew, RateKind::kDrifting};
  }
  return {DelayKind::kUniform, RateKind::kConstant};
}

namespace {

class Crash final : public sim::Process {
 public:
  bool correct() const override { return false; }
  void on_deliver(sim::NodeContext&, NodeId, const Message&) override {}
  void on_wake(sim::NodeContext&, LocalTime) override {}
};

// Runs a correct node internally and rewrites what it sends.
class Shadowed : public sim::Process {
 public:
  explicit Shadowed(const ByzantineSetup& s)
      : setup_(s), shadow_(s.constants, s.self, s.protocol, s.oracle), rng_(s.seed) {}

  bool correct() const override { return false; }

  void on_start(sim::NodeContext& ctx) override {
    Proxy p(*this, ctx);
    shadow_.on_start(p);
    start(ctx);
  }
  void on_deliver(sim::NodeContext& ctx, NodeId from, const Message& msg) override {
    Proxy p(*this, ctx);
    shadow_.on_deliver(p, from, msg);
  }
  void on_wake(sim::NodeContext& ctx, LocalTime value) override {
    Proxy p(*this, ctx);
    shadow_.on_wake(p, value);
    const LocalTime now = ctx.now();
    while (!timers_.empty() && *timers_.begin() <= now.units) {
      timers_.erase(timers_.begin());
      fire(ctx, now);
    }
  }
  void on_command(sim::NodeContext& ctx, const sim::Command& cmd) override {
    Proxy p(*this, ctx);
    shadow_.on_command(p, cmd);
  }

 protected:
  virtual void start(sim::NodeContext&) {}
  virtual void fire(sim::NodeContext&, LocalTime) {}
  virtual void outgoing(sim::NodeContext& ctx, NodeId to, Message msg) { ctx.send(to, std::move(msg)); }

  void timer(sim::NodeContext& ctx, LocalTime at) {
    if (at <= ctx.now()) at = ctx.now() + LocalTime{1};
    timers_.insert(at.units);
    ctx.wake_at(at);
  }

  int n() const { return setup_.constants.params.n; }
  NodeId self() const { return setup_.self; }
  const Constants& constants() const { return setup_.constants; }

  ByzantineSetup setup_;
  node::CorrectNode shadow_;
  sim::Rng rng_;

 private:
  class Proxy final : public sim::NodeContext {
   public:
    Proxy(Shadowed& owner, sim::NodeContext& real) : owner_(owner), real_(real) {}
    NodeId self() const override { return real_.self(); }
    int n() const override { return real_.n(); }
    LocalTime now() const override { return real_.now(); }
    void send(NodeId to, Message msg) override { owner_.outgoing(real_, to, std::move(msg)); }
    void send_with_delay(NodeId to, Message msg, RealTime delay) override {
      real_.send_with_delay(to, std::move(msg), delay);
    }
    void wake_at(LocalTime value) override { real_.wake_at(value); }
    void record(sim::TraceEvent) override {}

   private:
    Shadowed& owner_;
    sim::NodeContext& real_;
  };

  std::set<std::int64_t> timers_;
};

std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

class Equivocate final : public Shadowed {
 public:
  using Shadowed::Shadowed;

 protected:
  void outgoing(sim::NodeContext& ctx, NodeId to, Message msg) override {
    if (auto* r = std::get_if<RoundMsg>(&msg)) {
      if ((to + r->round) % 2 == 1) {
        if (!r->payload)
          r->payload = Payload::single(true);
        else if (r->payload->size() == 1)
          r->payload = Payload::single(!r->payload->bit(0));
      }
    } else if (std::holds_alternative<InitMsg>(msg)) {
      if (to % 2 == 0) return;
    }
    ctx.send(to, std::move(msg));
  }
};

class SplitEcho final : public Shadowed {
 public:
  using Shadowed::Shadowed;

 protected:
  void outgoing(sim::NodeContext& ctx, NodeId to, Message msg) override {
    if (const auto* i = std::get_if<InitMsg>(&msg)) {
      if (mix(setup_.seed ^ static_cast<std::uint64_t>(i->stamp.value) ^ (static_cast<std::uint64_t>(to) << 40)) % 2)
        return;
    } else if (const auto* e = std::get_if<EchoMsg>(&msg)) {
      const std::uint64_t h = mix(setup_.seed ^ static_cast<std::uint64_t>(e->label.stamp.value) ^
                                  (static_cast<std::uint64_t>(e->label.initiator) << 32) ^
                                  (static_cast<std::uint64_t>(to) << 48));
      if (h % 3 == 0) return;
    }
    ctx.send(to, std::move(msg));
  }
};

class ClockLiar final : public Shadowed {
 public:
  using Shadowed::Shadowed;

 protected:
  struct Stream {
    LiarPace pace;
    std::int64_t value{0};
    LocalTime next{};
    int sent{0};
  };

  void start(sim::NodeContext& ctx) override {
    const std::int64_t p = constants().tick_period.units;
    const LocalTime now = ctx.now();
    const std::int64_t base = (now.units / p) * p;
    for (NodeId r = 0; r < n(); ++r) {
      Stream s;
      s.pace = static_cast<LiarPace>((r + static_cast<int>(setup_.seed % 3)) % 3);
      s.value = base;
      s.next = now + LocalTime{static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(kLocalPerD))};
      streams_.push_back(s);
      if (r != self()) timer(ctx, s.next);
    }
  }

  void fire(sim::NodeContext& ctx, LocalTime now) override {
    const Constants& c = constants();
    // The liar's own clock runs at rate 1, so local gaps equal real gaps.
    const std::int64_t fast_gap = c.d_clock.units * 102 / 100;
    const std::int64_t slow_gap = (2 * c.params.theta_milli + 1000) * c.d_clock.units / 1000 * 97 / 100;
    const std::int64_t p = c.tick_period.units;
    // Streams stay within `reach` of the liar's clock so that receivers keep
    // finding support for them while they drift apart.
    const std::int64_t reach = c.support_tol.units / 2 - p;
    for (NodeId r = 0; r < n(); ++r) {
      if (r == self()) continue;
      Stream& s = streams_[static_cast<std::size_t>(r)];
      if (s.next > now) continue;
      UpdateMsg row;
      row.entries = shadow_.clock().state().rows[static_cast<std::size_t>(self())];
      row.entries.resize(static_cast<std::size_t>(n()));
      row.entries[static_cast<std::size_t>(self())] = wrap(s.value, c.modulus);
      ctx.send_with_delay(r, row, RealTime{kTicksPerD / 2});
      s.value += p;
      ++s.sent;
      bool fast = s.pace == LiarPace::kFastest;
      if (s.pace == LiarPace::kAlternating) fast = (s.sent / 8) % 2 == 0;
      std::int64_t gap = fast ? fast_gap : slow_gap;
      const std::int64_t ahead = s.value - now.units;  // lead of the next claim
      if (ahead > reach) gap = std::max(gap, ahead - reach);
      if (ahead < -reach) gap = fast_gap;
      s.next = now + LocalTime{std::clamp(gap, fast_gap, slow_gap)};
      timer(ctx, s.next);
    }
  }

  void outgoing(sim::NodeContext& ctx, NodeId to, Message msg) override {
    if (std::holds_alternative<UpdateMsg>(msg)) return;
    ctx.send(to, std::move(msg));
  }

 private:
  std::vector<Stream> streams_;
};

class Spam final : public Shadowed {
 public:
  using Shadowed::Shadowed;

 protected:
  void start(sim::NodeContext& ctx) override { timer(ctx, ctx.now() + LocalTime{kLocalPerD / 2}); }

  void fire(sim::NodeContext& ctx, LocalTime now) override {
    const Constants& c = constants();
    const NodeId target = static_cast<NodeId>(rng_() % static_cast<std::uint64_t>(n()));
    const Stamp random_stamp = wrap(static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(c.modulus)) /
                                        c.quantum.units * c.quantum.units,
                                    c.modulus);
    switch (rng_() % 6) {
      case 0:
        for (NodeId w = 0; w < n(); ++w)
          if (w != self()) ctx.send(w, InitMsg{random_stamp});
        break;
      case 1:
        for (NodeId w = 0; w < n(); ++w)
          if (w != self()) ctx.send(w, InitMsg{c.quantize(now)});
        break;
      case 2: {
        const InstanceLabel label{static_cast<NodeId>(rng_() % static_cast<std::uint64_t>(n())), random_stamp};
        for (NodeId w = 0; w < n(); ++w)
          if (w != self()) ctx.send(w, EchoMsg{label});
        break;
      }
      case 3: {
        InstanceLabel label{static_cast<NodeId>(rng_() % static_cast<std::uint64_t>(n())), random_stamp};
        const auto& states = shadow_.runner().states();
        if (!states.empty() && rng_() % 2) {
          auto it = states.begin();
          std::advance(it, static_cast<long>(rng_() % states.size()));
          label = it->first;
        }
        const int round = static_cast<int>(rng_() % static_cast<std::uint64_t>(c.params.rounds + 2));
        std::optional<Payload> payload;
        if (rng_() % 2) payload = Payload::single(rng_() % 2 == 1);
        if (target != self()) ctx.send(target, RoundMsg{label, round, payload});
        break;
      }
      case 4: {
        UpdateMsg bad;
        bad.entries.resize(static_cast<std::size_t>(n() + 1), random_stamp);
        if (target != self()) ctx.send(target, bad);
        break;
      }
      default: {
        UpdateMsg fake;
        fake.entries.resize(static_cast<std::size_t>(n()), random_stamp);
        if (target != self()) ctx.send(target, fake);
        break;
      }
    }
    timer(ctx, now + LocalTime{kLocalPerD / 2});
  }
};

}  // namespace

std::unique_ptr<sim::Process> make_byzantine(Strategy s, const ByzantineSetup& setup) {
  switch (s) {
    case Strategy::kCrash: return std::make_unique<Crash>();
    case Strategy::kEquivocate: return std::make_unique<Equivocate>(setup);
    case Strategy::kSplitEcho: return std::make_unique<SplitEcho>(setup);
    case Strategy::kClockLiar: return std::make_unique<ClockLiar>(setup);
    case Strategy::kSpam: return std::make_unique<Spam>(setup);
  }
  return std::make_unique<Crash>();
}

}  // namespace nic::byz
