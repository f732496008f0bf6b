#include "doctest.h"
#include "nic/rounds/round_runner.hpp"
#include "nic/silent/phase_king.hpp"
#include "nic/silent/silent.hpp"

using namespace nic;
using namespace nic::rounds;
using nic::sim::EndReason;
using nic::sim::TraceKind;

namespace {

std::shared_ptr<const silent::Protocol> wrapped() {
  return std::make_shared<silent::SilentProtocol>(std::make_shared<silent::PhaseKing>(4, 1));
}

Constants constants(int rounds = 8) {
  SystemParams p;
  p.n = 4;
  p.f = 1;
  p.theta_milli = 1100;
  p.rounds = rounds;
  p.rate_limit = LocalTime::from_d(100);
  p.payload_bits = wrapped()->bit_bound();
  return derive_constants(p);
}

LocalTime at(double x) { return LocalTime::from_d(x); }

const InstanceLabel kLabel{1, Stamp{12345}};

int count(const Effects& fx, TraceKind kind) {
  int c = 0;
  for (const auto& r : fx.records) c += r.kind == kind;
  return c;
}

// Sends far more than it declares.
class Chatty final : public silent::Protocol {
 public:
  Chatty() : Protocol(4, 1) {}
  int rounds() const override { return 8; }
  std::int64_t bit_bound() const override { return 1; }
  std::string name() const override { return "chatty"; }
  std::unique_ptr<silent::ProtocolInstance> start(NodeId, int) const override { return std::make_unique<Inst>(); }

 private:
  struct Inst final : silent::ProtocolInstance {
    silent::Outbox send(int) override {
      silent::Outbox out(4);
      Payload big;
      for (int i = 0; i < 5000; ++i) big.push(true);
      for (auto& p : out) p = big;
      return out;
    }
    void receive(int, const silent::Inbox&) override {}
    int output() const override { return 1; }
    std::unique_ptr<silent::ProtocolInstance> clone() const override { return std::make_unique<Inst>(*this); }
    std::string fingerprint() const override { return "c"; }
  };
};

}  // namespace

TEST_CASE("joining schedules the first threshold C after the join") {
  const Constants c = constants();
  CHECK(c.start_delay == at(24.2));
  RoundRunner rr(c, 0, wrapped(), c.header_bits);
  Effects fx;
  CHECK(rr.join(kLabel, 1, 2, at(600), fx));
  CHECK_FALSE(rr.join(kLabel, 0, 1, at(601), fx));
  CHECK(rr.states().size() == 1);
  CHECK(rr.states().at(kLabel).thresholds[1] == at(624.2));
  CHECK(rr.next_wake(at(600)) == at(624.2));

  Effects cross;
  rr.on_wake(at(624.2), cross);
  REQUIRE(cross.sends.size() == 3);
  for (const auto& [to, msg] : cross.sends) {
    CHECK(msg.round == 1);
    REQUIRE(msg.payload.has_value());
    CHECK(*msg.payload == Payload::single(true));
  }
}

TEST_CASE("an n-f quorum schedules the next threshold") {
  const Constants c = constants();
  RoundRunner rr(c, 0, wrapped(), c.header_bits);
  Effects fx;
  rr.join(kLabel, 0, 1, at(0), fx);
  auto& st = rr.states().at(kLabel);
  st.next_round = 3;
  st.inbox[2][0].stored = true;
  st.last_progress = at(99);
  rr.on_round_msg(1, RoundMsg{kLabel, 2, std::nullopt}, at(100), fx);
  CHECK_FALSE(st.thresholds[3].has_value());
  rr.on_round_msg(2, RoundMsg{kLabel, 2, std::nullopt}, at(100.5), fx);
  CHECK(st.thresholds[3] == at(100.5) + at(2.2));
}

TEST_CASE("f+1 messages pull a later threshold forward") {
  const Constants c = constants();
  RoundRunner rr(c, 0, wrapped(), c.header_bits);
  Effects fx;
  rr.join(kLabel, 0, 1, at(0), fx);
  auto& st = rr.states().at(kLabel);
  st.next_round = 2;
  st.thresholds[2] = at(105);
  st.last_progress = at(99);
  rr.on_round_msg(1, RoundMsg{kLabel, 2, std::nullopt}, at(100), fx);
  CHECK(st.thresholds[2] == at(105));
  Effects fx2;
  rr.on_round_msg(3, RoundMsg{kLabel, 2, std::nullopt}, at(100), fx2);
  CHECK(st.thresholds[2] == at(100));
  CHECK(st.next_round == 3);
  CHECK(count(fx2, TraceKind::kCross) == 1);

  Effects fx3;
  rr.on_round_msg(3, RoundMsg{kLabel, 2, Payload::single(true)}, at(100.1), fx3);
  CHECK(count(fx3, TraceKind::kDrop) == 1);
  CHECK_FALSE(st.inbox[2][3].payload.has_value());
}

TEST_CASE("out-of-range rounds and unknown labels are dropped") {
  const Constants c = constants();
  RoundRunner rr(c, 0, wrapped(), c.header_bits);
  Effects fx;
  rr.on_round_msg(1, RoundMsg{kLabel, 1, std::nullopt}, at(1), fx);
  rr.join(kLabel, 0, 1, at(0), fx);
  rr.on_round_msg(1, RoundMsg{kLabel, 9, std::nullopt}, at(1), fx);
  rr.on_round_msg(1, RoundMsg{kLabel, 0, std::nullopt}, at(1), fx);
  CHECK(count(fx, TraceKind::kDrop) == 3);
}

TEST_CASE("zero-input instance runs to completion with empty frames only") {
  const Constants c = constants();
  RoundRunner rr(c, 0, wrapped(), c.header_bits);
  Effects fx;
  rr.join(kLabel, 0, 1, at(0), fx);
  // The other three nodes send empty frames as soon as each round starts.
  LocalTime now = at(24.2);
  for (int round = 1; round <= 8; ++round) {
    Effects step;
    rr.on_wake(now, step);
    for (NodeId u = 1; u < 4; ++u) rr.on_round_msg(u, RoundMsg{kLabel, round, std::nullopt}, now + at(0.5), step);
    for (const auto& [to, msg] : step.sends) CHECK_FALSE(msg.payload.has_value());
    now = now + at(0.5) + at(2.2);
  }
  Effects last;
  rr.on_wake(now, last);
  const auto& st = rr.states().at(kLabel);
  CHECK(st.terminated);
  CHECK(st.output == 0);
  CHECK(st.reason == EndReason::kNormal);
  CHECK(last.sends.empty());
  CHECK(count(last, TraceKind::kOutput) == 1);
}

TEST_CASE("exceeding the bit budget aborts with output 0") {
  const Constants c = constants();
  RoundRunner rr(c, 0, std::make_shared<Chatty>(), c.header_bits);
  Effects fx;
  rr.join(kLabel, 1, 2, at(0), fx);
  rr.on_wake(at(24.2), fx);
  const auto& st = rr.states().at(kLabel);
  CHECK(st.terminated);
  CHECK(st.output == 0);
  CHECK(st.reason == EndReason::kAbort);
  CHECK(fx.sends.empty());
}

TEST_CASE("an instance without progress stalls to output 0") {
  const Constants c = constants();
  RoundRunner rr(c, 0, wrapped(), c.header_bits);
  Effects fx;
  rr.join(kLabel, 1, 2, at(0), fx);
  rr.on_wake(at(24.2), fx);
  const auto wake = rr.next_wake(at(24.2));
  REQUIRE(wake.has_value());
  // Round 1 has extra budget for the join spread.
  CHECK(c.join_slack == at(4.4));
  CHECK(*wake == at(24.2 + 6.82 + 4.4));
  rr.on_wake(*wake - LocalTime{1}, fx);
  CHECK_FALSE(rr.states().at(kLabel).terminated);
  rr.on_wake(*wake, fx);
  const auto& st = rr.states().at(kLabel);
  CHECK(st.terminated);
  CHECK(st.output == 0);
  CHECK(st.reason == EndReason::kStall);
}

TEST_CASE("instance memory is collected after its lifetime or when stamped in the future") {
  const Constants c = constants();
  RoundRunner rr(c, 0, wrapped(), c.header_bits);
  Effects fx;
  rr.join(kLabel, 0, 1, at(10), fx);
  rr.join(InstanceLabel{2, Stamp{1}}, 0, 1, at(5000), fx);
  CHECK(rr.gc(at(20)) == 1);
  CHECK(rr.gc(at(10) + c.instance_ttl) == 0);
  CHECK(rr.gc(at(10) + c.instance_ttl + LocalTime{1}) == 1);
}
