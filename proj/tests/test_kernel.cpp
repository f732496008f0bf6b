#include <map>

#include "doctest.h"
#include "nic/sim/kernel.hpp"

using namespace nic;
using namespace nic::sim;

namespace {

Constants test_constants() {
  SystemParams p;
  p.rate_limit = LocalTime::from_d(100);
  return derive_constants(p);
}

// Logs every handler call into a shared journal.
struct Recorder : Process {
  std::vector<std::pair<RealTime, NodeId>>* journal;
  NodeId self;
  Recorder(std::vector<std::pair<RealTime, NodeId>>* j, NodeId s) : journal(j), self(s) {}
  void on_deliver(NodeContext& ctx, NodeId, const Message&) override {
    TraceEvent ev;
    ev.kind = TraceKind::kMark;
    ctx.record(ev);
  }
  void on_wake(NodeContext& ctx, LocalTime) override {
    TraceEvent ev;
    ev.kind = TraceKind::kMark;
    ev.a = ctx.now().units;
    ctx.record(ev);
  }
  void on_command(NodeContext&, const Command&) override { journal->push_back({RealTime{}, self}); }
};

// Bounces every received init back to its sender a fixed number of times.
struct PingPong : Process {
  int remaining = 50;
  void on_start(NodeContext& ctx) override {
    if (ctx.self() == 0) ctx.send(1, InitMsg{Stamp{7}});
  }
  void on_deliver(NodeContext& ctx, NodeId from, const Message& m) override {
    if (remaining-- > 0) ctx.send(from, m);
  }
  void on_wake(NodeContext&, LocalTime) override {}
};

Kernel make_kernel(int n, std::vector<HardwareClock> clocks, std::vector<std::pair<RealTime, NodeId>>* journal,
                   std::uint64_t seed = 1) {
  std::vector<std::unique_ptr<Process>> procs;
  for (int v = 0; v < n; ++v) procs.push_back(std::make_unique<Recorder>(journal, v));
  KernelConfig cfg;
  cfg.n = n;
  cfg.seed = seed;
  return Kernel(cfg, std::move(clocks), std::move(procs), WireFormat(test_constants()));
}

Event command_at(RealTime t, NodeId node) {
  Event e;
  e.time = t;
  e.kind = EventKind::kCommand;
  e.node = node;
  return e;
}

}  // namespace

TEST_CASE("event order breaks ties by kind, then node") {
  std::vector<std::pair<RealTime, NodeId>> journal;
  Kernel k = make_kernel(3, std::vector<HardwareClock>(3), &journal);
  k.schedule(command_at(RealTime::from_d(3.0), 2));
  k.schedule(command_at(RealTime::from_d(3.0), 1));
  k.schedule(command_at(RealTime::from_d(2.5), 0));
  k.run_until(RealTime::from_d(10));
  REQUIRE(journal.size() == 3);
  CHECK(journal[0].second == 0);
  CHECK(journal[1].second == 1);
  CHECK(journal[2].second == 2);

  Event a = command_at(RealTime{5}, 0);
  Event b = a;
  b.kind = EventKind::kThreshold;
  b.node = 9;
  CHECK(b.before(a));
}

TEST_CASE("scheduling in the past is rejected") {
  std::vector<std::pair<RealTime, NodeId>> journal;
  Kernel k = make_kernel(2, std::vector<HardwareClock>(2), &journal);
  k.run_until(RealTime::from_d(2.0));
  CHECK_THROWS_AS(k.schedule(command_at(RealTime::from_d(1.0), 0)), ModelError);
}

TEST_CASE("running an empty queue only advances time") {
  std::vector<std::pair<RealTime, NodeId>> journal;
  Kernel k = make_kernel(2, std::vector<HardwareClock>(2), &journal);
  k.run_until(RealTime::from_d(10));
  CHECK(k.now() == RealTime::from_d(10));
  CHECK(k.trace().empty());
}

TEST_CASE("local clock readings") {
  std::vector<std::pair<RealTime, NodeId>> journal;
  HardwareClock piecewise;
  piecewise.set_rate_from(RealTime::from_d(5), 1100);
  Kernel k = make_kernel(3, {HardwareClock{}, HardwareClock{LocalTime{}, 1100}, piecewise}, &journal);
  CHECK(k.local_clock(0, RealTime::from_d(7)) == LocalTime::from_d(7));
  CHECK(k.local_clock(1, RealTime::from_d(10)) == LocalTime::from_d(11));

  // Summation oracle: integrate the schedule one tick at a time.
  std::int64_t sum = 0;
  for (std::int64_t t = 0; t < RealTime::from_d(10).ticks; ++t) sum += t < RealTime::from_d(5).ticks ? 1000 : 1100;
  CHECK(k.local_clock(2, RealTime::from_d(10)).units == sum);
  CHECK(k.local_clock(2, RealTime::from_d(10)) == LocalTime::from_d(10.5));
}

TEST_CASE("clock thresholds invert the rate schedule") {
  std::vector<std::pair<RealTime, NodeId>> journal;
  Kernel k = make_kernel(2, {HardwareClock{}, HardwareClock{LocalTime{}, 1100}}, &journal);
  k.run_until(RealTime::from_d(3));
  k.set_threshold(0, LocalTime::from_d(5));
  CHECK_THROWS_AS(k.set_threshold(0, LocalTime::from_d(1)), ModelError);

  std::vector<std::pair<RealTime, NodeId>> j2;
  Kernel k2 = make_kernel(2, {HardwareClock{}, HardwareClock{LocalTime{}, 1100}}, &j2);
  k2.set_threshold(1, LocalTime::from_d(2.42));
  k2.run_until(RealTime::from_d(10));
  REQUIRE(k2.trace().size() == 1);
  // Oracle: t = value / rate, done in integer arithmetic.
  CHECK(k2.trace()[0].time.ticks == LocalTime::from_d(2.42).units / 1100);
  CHECK(k2.trace()[0].time == RealTime::from_d(2.2));

  k.run_until(RealTime::from_d(10));
  REQUIRE(k.trace().size() == 1);
  CHECK(k.trace()[0].time == RealTime::from_d(5));
}

TEST_CASE("initial channel garbage must arrive before d") {
  std::vector<std::pair<RealTime, NodeId>> journal;
  Kernel k = make_kernel(2, std::vector<HardwareClock>(2), &journal);
  k.inject_garbage(1, 0, EchoMsg{InstanceLabel{1, Stamp{3}}}, RealTime::from_d(0.5));
  CHECK_THROWS_AS(k.inject_garbage(1, 0, EchoMsg{}, RealTime::from_d(1.5)), ModelError);
  k.run_until(RealTime::from_d(2));
  REQUIRE(k.trace().size() == 2);
  CHECK(k.trace()[0].kind == TraceKind::kDeliver);
  CHECK(k.trace()[0].time == RealTime::from_d(0.5));
  CHECK(k.trace()[0].value == 1);
}

namespace {
Trace ping_pong_trace(std::uint64_t seed) {
  std::vector<std::unique_ptr<Process>> procs;
  procs.push_back(std::make_unique<PingPong>());
  procs.push_back(std::make_unique<PingPong>());
  KernelConfig cfg;
  cfg.n = 2;
  cfg.seed = seed;
  Kernel k(cfg, std::vector<HardwareClock>(2), std::move(procs), WireFormat(test_constants()));
  k.run_until(RealTime::from_d(200));
  return k.take_trace();
}
}  // namespace

TEST_CASE("identical seeds give identical traces") {
  const Trace a = ping_pong_trace(42);
  const Trace b = ping_pong_trace(42);
  CHECK(trace_digest(a) == trace_digest(b));
  CHECK(trace_digest(a) != trace_digest(ping_pong_trace(43)));
}

TEST_CASE("every delivery matches a send and lands strictly inside (0, d)") {
  const Trace t = ping_pong_trace(7);
  std::map<std::uint64_t, RealTime> sent;
  int deliveries = 0;
  for (const auto& ev : t) {
    if (ev.kind == TraceKind::kSend) sent[ev.envelope] = ev.time;
    if (ev.kind == TraceKind::kDeliver) {
      REQUIRE(sent.count(ev.envelope) == 1);
      const auto delay = ev.time - sent[ev.envelope];
      CHECK(delay > RealTime{0});
      CHECK(delay < RealTime{kTicksPerD});
      ++deliveries;
    }
  }
  CHECK(deliveries > 40);
}
