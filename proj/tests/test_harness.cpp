#include <sstream>

#include "doctest.h"
#include "nic/harness/analysis.hpp"
#include "nic/harness/run.hpp"

using namespace nic;
using namespace nic::harness;

namespace {

Scenario scripted() {
  Scenario s;
  s.n = 4;
  s.f = 1;
  s.adversary = "crash";
  s.T = 3;
  s.regain_hold = 20;
  s.duration = 300;
  s.initiations.enabled = false;
  s.script = {{0, 150}};
  return s;
}

bool rejects(const nlohmann::json& j, const std::string& fragment) {
  try {
    resolve(scenario_from_json(j));
  } catch (const ScenarioError& e) {
    for (const auto& p : e.problems())
      if (p.find(fragment) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("scenario validation reports each violated constraint") {
  CHECK(rejects({{"n", 4}, {"f", 2}}, "f < n/3"));
  CHECK(rejects({{"n", 6}, {"f", 2}}, "f < n/3"));
  CHECK(rejects({{"n", 4}, {"T", 1.0}}, "T must be at least"));
  CHECK(rejects({{"n", 4}, {"T", 100}, {"duration", 1080}}, "duration must exceed"));
  CHECK(rejects({{"n", 4}, {"bogus", 1}}, "unknown key 'bogus'"));
  CHECK(rejects({{"n", 4}, {"adversary", "nope"}}, "unknown adversary"));
  CHECK(rejects({{"n", 4}, {"d", 2.0}}, "d is the time unit"));
  CHECK_NOTHROW(resolve(scenario_from_json({{"n", 4}, {"T", 100}, {"duration", 1081}})));
}

TEST_CASE("scenario json round-trips") {
  const Scenario s = scripted();
  const auto j = scenario_to_json(s);
  CHECK(scenario_to_json(scenario_from_json(j)) == j);
}

TEST_CASE("trace records round-trip through their text form") {
  const RunResult run = run_scenario(scripted());
  REQUIRE(!run.trace.empty());
  std::stringstream ss;
  sim::write_trace(ss, run.trace);
  const sim::Trace back = sim::read_trace(ss);
  CHECK(back == run.trace);
  CHECK(sim::trace_digest(back) == sim::trace_digest(run.trace));
}

TEST_CASE("a scripted initiation is joined and finished by every correct node") {
  const RunResult run = run_scenario(scripted());
  const TraceIndex idx = index_trace(run.trace, run.resolved);
  int found = 0;
  for (const auto& inst : idx.instances) {
    if (inst.label.initiator != 0 || !inst.initiated) continue;
    if (inst.first_join()->in_d() < 150) continue;
    ++found;
    for (NodeId v = 0; v < run.scenario.n; ++v) {
      if (run.resolved.faulty[v]) continue;
      const auto it = inst.nodes.find(v);
      REQUIRE(it != inst.nodes.end());
      CHECK(it->second.ended);
      CHECK(it->second.reason == sim::EndReason::kNormal);
    }
  }
  CHECK(found == 1);
  const Verdict v = evaluate(run);
  CHECK(v.pass());
  CHECK(v.find("timing")->examined >= 1);
}

TEST_CASE("evaluation is deterministic") {
  const RunResult a = run_scenario(scripted());
  const RunResult b = run_scenario(scripted());
  CHECK(sim::trace_digest(a.trace) == sim::trace_digest(b.trace));
  CHECK(evaluate(a).to_json() == evaluate(b).to_json());
}

TEST_CASE("tampering with a recorded output fails the oracle check") {
  RunResult run = run_scenario(scripted());
  REQUIRE(check_oracle_equivalence(run, index_trace(run.trace, run.resolved)).pass);
  bool tampered = false;
  for (auto& ev : run.trace) {
    if (ev.kind == sim::TraceKind::kOutput && ev.time.in_d() > 150 && !run.resolved.faulty[ev.node]) {
      ev.value = ev.value == 0 ? 1 : 0;
      tampered = true;
      break;
    }
  }
  REQUIRE(tampered);
  CHECK_FALSE(check_oracle_equivalence(run, index_trace(run.trace, run.resolved)).pass);
}

TEST_CASE("tampering with a recorded round message fails the oracle check") {
  RunResult run = run_scenario(scripted());
  bool tampered = false;
  for (auto& ev : run.trace) {
    if (ev.kind == sim::TraceKind::kStore && ev.time.in_d() > 150 && ev.payload.present && ev.payload.length > 0 &&
        !run.resolved.faulty[ev.node]) {
      ev.payload.bits ^= 1;
      tampered = true;
      break;
    }
  }
  REQUIRE(tampered);
  CHECK_FALSE(check_oracle_equivalence(run, index_trace(run.trace, run.resolved)).pass);
}
