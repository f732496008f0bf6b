// Runs the full acceptance sweep and prints one PASS/FAIL line per criterion.
// Writes the complete per-run verdicts to acceptance_report.json in the
// working directory so failures can be inspected with `nic explain`.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "nic/harness/sweep.hpp"

using namespace nic;
using namespace nic::harness;

namespace {

struct Tally {
  int runs{0};
  int failed_runs{0};
  std::int64_t examined{0};
  std::map<std::string, double> worst;
  std::string first_failure;
};

Tally tally(const SweepReport& report, const std::set<std::string>& groups, const std::set<std::string>& checks) {
  Tally t;
  for (const auto& r : report.runs) {
    if (!groups.count(r.group)) continue;
    bool counted = false;
    bool failed = false;
    for (const auto& c : r.verdict.checks) {
      if (!checks.count(c.id)) continue;
      counted = true;
      t.examined += c.examined;
      for (const auto& [k, v] : c.measured.items())
        if (v.is_number()) t.worst[c.id + "." + k] = std::max(t.worst[c.id + "." + k], v.get<double>());
      if (!c.pass) {
        failed = true;
        if (t.first_failure.empty())
          t.first_failure = r.id + "/" + c.id + (c.counterexamples.empty() ? "" : ": " + c.counterexamples.front());
      }
    }
    t.runs += counted ? 1 : 0;
    t.failed_runs += failed ? 1 : 0;
  }
  return t;
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

int failures = 0;

void line(int id, const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << " " << name << ": " << detail << std::endl;
}

std::string summary(const Tally& t) {
  std::string s = std::to_string(t.runs - t.failed_runs) + "/" + std::to_string(t.runs) + " runs clean, " +
                  std::to_string(t.examined) + " samples";
  if (!t.first_failure.empty()) s += "; first failure " + t.first_failure;
  return s;
}

}  // namespace

int main() {
  SweepConfig cfg;
  cfg.progress = [](const std::string& msg) { std::cerr << msg << '\n'; };
  cfg.jobs = std::max(1u, std::thread::hardware_concurrency());
  const SweepReport report = run_sweep(cfg);
  {
    std::ofstream out("acceptance_report.json");
    out << report.to_json().dump(1) << '\n';
  }
  const Ceilings ceil = cfg.ceilings;
  const std::set<std::string> clean{"clean"};

  {
    auto t = tally(report, clean, {"oracle"});
    line(1, "oracle-equivalence", t.failed_runs == 0 && t.examined > 0,
         summary(t) + ", mismatching instances " + num(t.worst["oracle.mismatching_instances"]));
  }
  {
    const auto t = tally(report, clean, {"agreement"});
    line(2, "agreement-validity-safety", t.failed_runs == 0 && t.examined > 0, summary(t));
  }
  {
    auto t = tally(report, clean, {"timing"});
    const bool ok = t.failed_runs == 0 && t.examined > 0 && t.worst["timing.K2"] <= ceil.k2 &&
                    t.worst["timing.K5"] <= ceil.k5;
    line(3, "timing-windows", ok,
         summary(t) + ", K2 " + num(t.worst["timing.K2"]) + ", K5 " + num(t.worst["timing.K5"]) +
             ", longest instance " + num(t.worst["timing.max_duration"]) + "d");
  }
  {
    const auto t = tally(report, clean, {"silence"});
    line(4, "silence", t.failed_runs == 0 && t.examined > 0, summary(t));
  }
  {
    auto t = tally(report, clean, {"clock"});
    line(5, "clock-accuracy", t.failed_runs == 0 && t.examined > 0,
         summary(t) + ", latest t0 " + num(t.worst["clock.t0"]) + "d, worst staleness " +
             num(t.worst["clock.max_staleness_d"]) + "d");
  }
  {
    auto t = tally(report, {"corrupted"}, {"oracle", "agreement", "timing", "silence", "clock"});
    const bool ok = t.failed_runs == 0 && t.runs >= 100 && t.examined > 0;
    line(6, "self-stabilization", ok, summary(t) + ", latest t0 " + num(t.worst["clock.t0"]) + "d");
  }
  {
    auto with = tally(report, {"clean", "corrupted"}, {"bits"});
    auto infra = tally(report, {"infra"}, {"bits-infra"});
    const double c = std::max(with.worst["bits.c_bits"], infra.worst["bits-infra.c_bits"]);
    const bool ok = with.failed_runs == 0 && infra.failed_runs == 0 && with.runs > 0 && infra.runs > 0 &&
                    c <= ceil.c_bits;
    line(7, "amortized-bits", ok,
         "c_bits " + num(with.worst["bits.c_bits"]) + " over " + std::to_string(with.runs) + " runs, infra-only c " +
             num(infra.worst["bits-infra.c_bits"]) + " over " + std::to_string(infra.runs) + " runs" +
             (with.first_failure.empty() ? "" : "; first failure " + with.first_failure) +
             (infra.first_failure.empty() ? "" : "; first failure " + infra.first_failure));
  }
  {
    auto t = tally(report, {"clean", "corrupted"}, {"envelope"});
    const bool ok = t.failed_runs == 0 && t.examined > 0 && t.worst["envelope.K1"] <= ceil.k1;
    line(8, "byzantine-clock-envelope", ok, summary(t) + ", K1 " + num(t.worst["envelope.K1"]));
  }
  {
    const auto bf = brute_force_phase_king();
    line(9, "phase-king-brute-force", bf.pass(),
         std::to_string(bf.plain.terminal_states) + " + " + std::to_string(bf.wrapped.terminal_states) +
             " terminal states, violations " +
             std::to_string(bf.plain.agreement_violations + bf.plain.validity_violations +
                            bf.wrapped.agreement_violations + bf.wrapped.validity_violations));
  }
  std::cout << report.runs.size() << " runs in " << num(report.seconds) << "s" << std::endl;
  return failures == 0 ? 0 : 1;
}
