#include "doctest.h"
#include "nic/clock/estimates.hpp"

using namespace nic;
using nic::clock::ClockEstimates;

namespace {

Constants constants(ClockAlgorithm algo = ClockAlgorithm::kSelfStabilizing) {
  SystemParams p;
  p.n = 4;
  p.f = 1;
  p.theta_milli = 1100;
  p.rate_limit = LocalTime::from_d(100);
  p.clock_algorithm = algo;
  return derive_constants(p);
}

LocalTime at(double x) { return LocalTime::from_d(x); }
Stamp stamp(double x) { return Stamp{LocalTime::from_d(x).units}; }

UpdateMsg row(std::vector<std::optional<double>> vals) {
  UpdateMsg m;
  for (auto v : vals) m.entries.push_back(v ? std::optional<Stamp>(stamp(*v)) : std::nullopt);
  return m;
}

}  // namespace

TEST_CASE("instantiated clock-estimate tolerances") {
  const Constants c = constants();
  CHECK(c.too_slow == at(3.52));
  CHECK(c.support_tol == at(6.82));
  CHECK(c.tick_period == at(2.2));
}

TEST_CASE("tick reports a recently heard clock and distrusts a late one") {
  const Constants c = constants();
  ClockEstimates ce(c, 0);
  auto& st = ce.state();
  st.rows[1][1] = stamp(90);
  st.rows[2][2] = stamp(91);
  st.last_receipt[1] = at(1000 - 3.0);
  st.last_receipt[2] = at(1000 - 4.0);
  const UpdateMsg out = ce.on_tick(at(1000));
  CHECK(out.entries[1] == stamp(90));
  CHECK_FALSE(out.entries[2].has_value());
  CHECK_FALSE(ce.estimate(2, at(1000)).has_value());
  CHECK(out.entries[0] == c.quantize(at(1000)));
  // Never-heard node 3 is reset as well.
  CHECK_FALSE(out.entries[3].has_value());
}

TEST_CASE("healthy steady state reports every clock") {
  const Constants c = constants();
  ClockEstimates ce(c, 0);
  auto& st = ce.state();
  for (NodeId w = 1; w < 4; ++w) {
    st.rows[w][w] = stamp(50 + w);
    st.last_receipt[w] = at(999);
  }
  const UpdateMsg out = ce.on_tick(at(1000));
  for (NodeId w = 0; w < 4; ++w) CHECK(out.entries[w].has_value());
}

TEST_CASE("update timing and value chain") {
  const Constants c = constants();
  ClockEstimates ce(c, 0);
  auto& st = ce.state();
  // Everyone already agrees on w=1 at 100.0.
  for (NodeId u = 0; u < 4; ++u) st.rows[u][1] = stamp(100.0);
  st.last_receipt[1] = at(498.0);

  auto ok = ce.on_update(1, row({500.0, 102.2, 0.0, 0.0}), at(500.0));
  CHECK_FALSE(ok.timing_violation);
  CHECK_FALSE(st.report_hold[1].last_reset().has_value());

  ClockEstimates ce2(c, 0);
  auto& st2 = ce2.state();
  for (NodeId u = 0; u < 4; ++u) st2.rows[u][1] = stamp(100.0);
  st2.last_receipt[1] = at(498.0);
  auto bad = ce2.on_update(1, row({500.0, 103.0, 0.0, 0.0}), at(500.0));
  CHECK(bad.timing_violation);
  CHECK(st2.report_hold[1].last_reset() == at(500.0));
  CHECK(st2.trust_hold[1].last_reset() == at(500.0));
  // The row is stored regardless.
  CHECK(st2.rows[1][1] == stamp(103.0));

  ClockEstimates ce3(c, 0);
  auto& st3 = ce3.state();
  for (NodeId u = 0; u < 4; ++u) st3.rows[u][1] = stamp(100.0);
  st3.last_receipt[1] = at(499.5);
  CHECK(ce3.on_update(1, row({500.0, 102.2, 0.0, 0.0}), at(500.0)).timing_violation);
}

TEST_CASE("support check needs n-f agreeing rows") {
  const Constants c = constants();
  ClockEstimates ce(c, 0);
  auto& st = ce.state();
  const LocalTime now = at(1000);
  // Node 2 claims 200; rows 0 and 3 are close (within 6.82), row 1 arrives below.
  st.rows[2][2] = stamp(200);
  st.rows[0][2] = stamp(195);
  st.rows[3][2] = stamp(300);
  st.last_receipt[1] = at(990);
  ce.on_update(1, row({1.0, 10.0, 194.0, 0.0}), now);
  // Agreeing rows for x=2: 2 itself, 0 (5.0), 1 (6.0) -> 3 = n-f.
  CHECK(st.trust_hold[2].last_reset() != now);

  st.rows[1][2] = stamp(190.0);
  ce.on_update(1, row({1.0, 12.2, 190.0, 0.0}), at(1002.2));
  // Now only 2 and 0 agree.
  CHECK(st.trust_hold[2].last_reset() == at(1002.2));
}

TEST_CASE("estimate follows the trust timeout") {
  const Constants c = constants();
  ClockEstimates ce(c, 0);
  auto& st = ce.state();
  st.rows[1][1] = stamp(57.2);
  CHECK(ce.estimate(1, at(10)) == stamp(57.2));
  st.trust_hold[1].reset(at(9));
  CHECK_FALSE(ce.estimate(1, at(10)).has_value());
  CHECK(ce.estimate(0, at(33.3)) == c.quantize(at(33.3)));
  CHECK(ce.estimate(0, at(33.3))->value % c.quantum.units == 0);
}

TEST_CASE("future timestamps from a corrupted state count as violations") {
  const Constants c = constants();
  ClockEstimates ce(c, 0);
  auto& st = ce.state();
  st.last_receipt[1] = at(5000);
  st.rows[1][1] = stamp(1);
  ce.on_tick(at(10));
  CHECK(st.trust_hold[1].last_reset() == at(10));
}

TEST_CASE("non-stabilizing variant distrusts permanently") {
  const Constants c = constants(ClockAlgorithm::kSimple);
  ClockEstimates ce(c, 0);
  ce.bootstrap({stamp(0), stamp(2.2), stamp(4.4), stamp(6.6)});
  CHECK(ce.estimate(1, at(0)) == stamp(2.2));
  ce.on_update(1, row({0.0, 4.4, 4.4, 6.6}), at(1.5));
  CHECK(ce.estimate(1, at(1.5)) == stamp(4.4));
  ce.on_update(1, row({0.0, 7.0, 4.4, 6.6}), at(4.0));
  CHECK_FALSE(ce.estimate(1, at(4.0)).has_value());
  ce.on_update(1, row({0.0, 9.2, 4.4, 6.6}), at(10.0));
  CHECK_FALSE(ce.estimate(1, at(1e6)).has_value());
}
