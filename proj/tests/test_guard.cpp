#include <cmath>

#include "doctest.h"
#include "nic/guard/guard.hpp"
#include "nic/silent/phase_king.hpp"
#include "nic/silent/silent.hpp"

using namespace nic;
using namespace nic::guard;

namespace {

std::shared_ptr<const silent::Protocol> wrapped() {
  return std::make_shared<silent::SilentProtocol>(std::make_shared<silent::PhaseKing>(4, 1));
}

Constants constants() {
  SystemParams p;
  p.n = 4;
  p.f = 1;
  p.theta_milli = 1100;
  p.rounds = 8;
  p.rate_limit = LocalTime::from_d(100);
  p.payload_bits = wrapped()->bit_bound();
  return derive_constants(p);
}

LocalTime at(double x) { return LocalTime::from_d(x); }

// Joins `count` instances of initiator 2 at `when`, each with the given input,
// and runs them past their first threshold.
std::map<InstanceLabel, rounds::RoundState> fabricate(const Constants& c, int count, int input, double when) {
  rounds::RoundRunner rr(c, 0, wrapped(), c.header_bits);
  rounds::Effects fx;
  for (int i = 0; i < count; ++i) rr.join(InstanceLabel{2, Stamp{1000 + i}}, input, 2, at(when), fx);
  rr.on_wake(at(when) + c.start_delay, fx);
  return std::move(rr.states());
}

}  // namespace

TEST_CASE("overload thresholds follow the window formulas") {
  const Constants c = constants();
  const double theta = 1.1, T = 100, R = 8, n = 4, f = 1, run = 4;
  const double window = (T / theta - 1) / theta;
  CHECK(c.window.in_d() == doctest::Approx(window).epsilon(1e-6));
  CHECK(c.k1 == static_cast<int>(std::ceil(run * R / window)) + 1);
  CHECK(c.k2 == static_cast<int>(std::ceil((n - f) * run * R / window)) + static_cast<int>(n));
}

TEST_CASE("one live instance per initiator is consistent") {
  const Constants c = constants();
  const auto states = fabricate(c, 1, 1, 10);
  const auto k = count_instances(c, states, 2, at(40));
  CHECK(k.active_nontrivial == 1);
  CHECK(k.active_total == 1);
  CHECK(detect_overload(c, states, 2, at(40)) == Verdict::kOk);
  CHECK(detect_overload(c, states, 3, at(40)) == Verdict::kOk);
}

TEST_CASE("too many nontrivial instances are inconsistent") {
  const Constants c = constants();
  CHECK(detect_overload(c, fabricate(c, c.k1, 1, 10), 2, at(40)) == Verdict::kOk);
  CHECK(detect_overload(c, fabricate(c, c.k1 + 1, 1, 10), 2, at(40)) == Verdict::kInconsistent);
}

TEST_CASE("too many recent trivial instances are inconsistent until they leave the window") {
  const Constants c = constants();
  const auto states = fabricate(c, c.k2 + 1, 0, 10);
  CHECK(count_instances(c, states, 2, at(40)).active_nontrivial == 0);
  CHECK(detect_overload(c, states, 2, at(40)) == Verdict::kInconsistent);
  CHECK(detect_overload(c, fabricate(c, c.k2, 0, 10), 2, at(40)) == Verdict::kOk);
  CHECK(detect_overload(c, states, 2, at(10) + c.window) == Verdict::kOk);
}

TEST_CASE("quarantine lasts theta d") {
  const Constants c = constants();
  Quarantine q(c);
  CHECK_FALSE(q.active(at(50)));
  CHECK_FALSE(q.due(at(50)));
  q.begin(at(50));
  CHECK(q.active(at(51.09)));
  CHECK_FALSE(q.due(at(51.09)));
  CHECK_FALSE(q.active(at(51.1)));
  CHECK(q.due(at(51.1)));
  q.finish();
  CHECK_FALSE(q.due(at(60)));
}

TEST_CASE("a quarantine ending implausibly late is due at once") {
  const Constants c = constants();
  Quarantine q(c);
  q.set_until(at(500));
  CHECK(q.due(at(50)));
}

TEST_CASE("bit ledger separates round traffic") {
  BitLedger b;
  b.account(RoundMsg{InstanceLabel{1, Stamp{2}}, 3, std::nullopt}, 40);
  b.account(InitMsg{Stamp{5}}, 30);
  b.account(UpdateMsg{}, 12);
  CHECK(b.instance == 40);
  CHECK(b.infra == 42);
}
