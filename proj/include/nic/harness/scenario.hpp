#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nic/byz/strategies.hpp"
#include "nic/constants.hpp"

namespace nic::harness {

/// Raised when a scenario fails validation; lists every violated constraint.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct ScriptedInitiation {
  NodeId node{0};
  double time{0};  // in units of d
};

/// Every correct node initiates repeatedly, waiting a random multiple in
/// [min_gap, max_gap] of T between attempts, starting after `warmup`.
struct InitiationPlan {
  bool enabled{true};
  double warmup{0};   // in d
  double min_gap{1.1};
  double max_gap{2.0};
};

struct CorruptionSpec {
  bool enabled{false};
  std::uint64_t seed{0};
};

/// Simulation configuration. All durations are in units of d.
struct Scenario {
  int n{4};
  int f{1};
  std::string theta{"1.1"};
  double d{1.0};
  double T{100};
  std::optional<int> R;
  std::string protocol{"phase-king"};
  std::string adversary{"crash"};
  std::optional<std::string> delay;  // overrides the adversary's delay policy
  std::optional<std::string> rates;  // overrides the adversary's rate policy
  std::vector<NodeId> byzantine;     // empty: chosen from the seed
  std::uint64_t seed{1};
  double duration{1000};
  int clock_update_period{1};
  CorruptionSpec corruption;
  std::vector<ScriptedInitiation> script;
  InitiationPlan initiations;
  double probe_period{5};
  std::optional<double> regain_hold;
  std::string clock_algorithm{"self-stabilizing"};
  bool record_update_deliveries{false};
};

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

/// Validates and derives protocol constants; throws ScenarioError.
struct Resolved {
  Constants constants;
  byz::Strategy strategy;
  byz::DelayKind delay;
  byz::RateKind rates;
  std::vector<bool> faulty;
};
Resolved resolve(const Scenario& s);

/// Rounds of the wrapped protocol for (n, f).
int silent_rounds(int n, int f);

/// Stabilization deadline 10 (R + T) d, in d.
double stabilization_time(const Scenario& s, const Constants& c);

/// Scenario whose T makes the stabilization deadline exceed the trust-regain
/// time, with duration covering a bit-accounting window afterwards.
Scenario acceptance_scenario(int n, const std::string& theta, byz::Strategy adversary, std::uint64_t seed);

}  // namespace nic::harness
