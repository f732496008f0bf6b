#include "doctest.h"
#include "nic/init/initiation.hpp"

using namespace nic;
using nic::init::EchoVerdict;
using nic::init::Initiation;
using nic::init::InitVerdict;

namespace {

Constants constants() {
  SystemParams p;
  p.n = 4;
  p.f = 1;
  p.theta_milli = 1100;
  p.rate_limit = LocalTime::from_d(100);
  return derive_constants(p);
}

LocalTime at(double x) { return LocalTime::from_d(x); }
Stamp stamp(double x) { return Stamp{LocalTime::from_d(x).units}; }

}  // namespace

TEST_CASE("own initiations are rate limited by T") {
  const Constants c = constants();
  Initiation ini(c, 0);
  CHECK(ini.initiate(at(500)) == c.quantize(at(500)));
  CHECK_FALSE(ini.initiate(at(550)).has_value());
  CHECK(ini.initiate(at(601)).has_value());
}

TEST_CASE("init is echoed only when close to the trusted estimate") {
  const Constants c = constants();
  Initiation ini(c, 0);
  CHECK(ini.on_init(1, stamp(100.0), stamp(99.0), at(10)) == InitVerdict::kEcho);
  Initiation ini2(c, 0);
  CHECK(ini2.on_init(1, stamp(104.0), stamp(99.0), at(10)) == InitVerdict::kOutOfTolerance);
  Initiation ini3(c, 0);
  CHECK(ini3.on_init(1, stamp(100.0), std::nullopt, at(10)) == InitVerdict::kNoTrust);
}

TEST_CASE("inits arriving too soon after the previous one are ignored") {
  const Constants c = constants();
  Initiation ini(c, 0);
  // T/theta - d = 100/1.1 - 1
  CHECK(c.init_ignore == LocalTime{c.rate_limit.units * 1000 / 1100} - c.d);
  CHECK(ini.on_init(1, stamp(100), stamp(100), at(10)) == InitVerdict::kEcho);
  const LocalTime soon{at(10).units + c.init_ignore.units * 3 / 10};
  CHECK(ini.on_init(1, stamp(100), stamp(100), soon) == InitVerdict::kRateLimited);
  CHECK(ini.on_init(1, stamp(300), stamp(300), soon + c.init_ignore) == InitVerdict::kEcho);
}

TEST_CASE("f+1 echoes arm the delay timeout once") {
  const Constants c = constants();
  Initiation ini(c, 0);
  const InstanceLabel label{2, stamp(40)};
  CHECK(ini.on_echo(1, label, stamp(40), at(50)) == EchoVerdict::kStored);
  CHECK(ini.on_echo(3, label, stamp(40), at(50.5)) == EchoVerdict::kStoredAndArmed);
  CHECK(ini.next_expiry(at(50.5)) == at(50.5) + at(2.2));
  CHECK(ini.on_echo(2, label, stamp(40), at(51)) == EchoVerdict::kStored);
  CHECK(ini.on_echo(2, label, stamp(40), at(51.2)) == EchoVerdict::kDuplicate);
  CHECK(ini.next_expiry(at(51)) == at(52.7));
  CHECK(ini.take_expired(at(52.6)).empty());
  auto fired = ini.take_expired(at(52.7));
  REQUIRE(fired.size() == 1);
  CHECK(fired[0].confidence == 2);
  CHECK(fired[0].label == label);
}

TEST_CASE("echo tolerance is Delta") {
  const Constants c = constants();
  Initiation ini(c, 0);
  CHECK(c.echo_tol == at(8.8));
  const InstanceLabel label{2, stamp(40)};
  CHECK(ini.on_echo(1, label, stamp(40 + 8.8 + 0.1), at(50)) == EchoVerdict::kOutOfTolerance);
  CHECK(ini.on_echo(1, label, stamp(40 + 8.8), at(50)) == EchoVerdict::kStored);
}

TEST_CASE("echoes are stored while the initiator is distrusted") {
  const Constants c = constants();
  Initiation ini(c, 0);
  const InstanceLabel label{2, stamp(40)};
  CHECK(ini.on_echo(1, label, std::nullopt, at(50)) == EchoVerdict::kStored);
  CHECK(ini.on_echo(3, label, std::nullopt, at(50.5)) == EchoVerdict::kStoredAndArmed);
  CHECK(ini.on_echo(0, label, stamp(40), at(51)) == EchoVerdict::kStored);
  auto fired = ini.take_expired(at(52.7));
  REQUIRE(fired.size() == 1);
  CHECK(fired[0].confidence == 2);
}

TEST_CASE("fewer than n-f echoes give a zero-input participation") {
  const Constants c = constants();
  Initiation ini(c, 0);
  const InstanceLabel label{2, stamp(40)};
  ini.on_echo(1, label, stamp(40), at(50));
  ini.on_echo(3, label, stamp(40), at(50));
  auto fired = ini.take_expired(at(60));
  REQUIRE(fired.size() == 1);
  CHECK(fired[0].confidence == 1);
}

TEST_CASE("garbage collection of echo tuples") {
  const Constants c = constants();
  Initiation ini(c, 0);
  const InstanceLabel label{2, stamp(40)};
  auto& st = ini.state();
  st.echoes[label].stored[1] = at(1000) - c.echo_ttl * 2;
  st.echoes[label].stored[2] = at(1000) + at(100);
  st.echoes[label].stored[3] = at(1000) - LocalTime{c.echo_ttl.units / 2};
  CHECK(ini.gc(at(1000)) == 2);
  CHECK(st.echoes[label].stored.size() == 1);
  CHECK(st.echoes[label].stored.count(3) == 1);
  ini.wipe();
  CHECK(st.echoes.empty());
}
