#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nic/harness/analysis.hpp"
#include "nic/silent/lockstep.hpp"

namespace nic::harness {

struct SweepConfig {
  std::vector<int> sizes{4, 7, 10};
  std::vector<std::string> thetas{"1.0", "1.1"};
  int seeds{20};
  std::vector<byz::Strategy> adversaries = byz::all_strategies();
  int corrupted_runs{100};
  bool infra_runs{true};
  Ceilings ceilings;
  unsigned jobs{1};  // runs evaluated concurrently
  std::function<void(const std::string&)> progress;
};

struct RunSummary {
  std::string id;  // e.g. "n7-t1.1-spam-s12" or "corrupt-n4-t1.0-crash-s3"
  std::string group;  // "clean", "corrupted" or "infra"
  Scenario scenario;
  Verdict verdict;
  double seconds{0};
};

struct SweepReport {
  std::vector<RunSummary> runs;
  double seconds{0};

  bool pass() const;
  nlohmann::json to_json() const;
  /// Runs whose check `id` failed, as "<run>/<check>" verdict ids.
  std::vector<std::string> failures() const;
};

/// Acceptance scenarios for every (size, theta, adversary, seed), the
/// corrupted-boot runs and one infra-only run per (size, theta).
std::vector<RunSummary> plan_sweep(const SweepConfig& cfg);

SweepReport run_sweep(const SweepConfig& cfg);

/// Evaluates one scenario under the verdict naming used by the sweep.
RunSummary run_one(RunSummary planned, const Ceilings& ceilings);

/// Outcome of the exhaustive faulty-message search at n = 4, f = 1.
struct BruteForceVerdict {
  silent::BruteForceResult plain;
  silent::BruteForceResult wrapped;
  bool pass() const;
};
BruteForceVerdict brute_force_phase_king();

}  // namespace nic::harness
