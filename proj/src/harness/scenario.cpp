#include "nic/harness/scenario.hpp"

#include <cmath>
#include <set>

namespace nic::harness {

using nlohmann::json;

ScenarioError::ScenarioError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string msg = "invalid scenario:";
        for (const auto& p : problems) msg += "\n  - " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

int silent_rounds(int n, int f) {
  (void)n;
  return 3 * (f + 1) + 2;
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <typename T>
void read(const json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  static const std::set<std::string> known{
      "n", "f", "theta", "d", "T", "R", "protocol", "adversary", "delay", "rates", "byzantine", "seed", "duration",
      "clock_update_period", "corruption", "script", "initiations", "probe_period", "regain_hold",
      "clock_algorithm", "record_update_deliveries"};
  std::vector<std::string> problems;
  if (!j.is_object()) throw ScenarioError({"scenario must be a JSON object"});
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) problems.push_back("unknown key '" + k + "'");

  Scenario s;
  try {
    read(j, "n", s.n);
    if (j.contains("f"))
      s.f = j.at("f").get<int>();
    else
      s.f = (s.n - 1) / 3;
    if (j.contains("theta")) {
      const auto& t = j.at("theta");
      s.theta = t.is_string() ? t.get<std::string>() : t.dump();
    }
    read(j, "d", s.d);
    read(j, "T", s.T);
    read(j, "R", s.R);
    read(j, "protocol", s.protocol);
    read(j, "adversary", s.adversary);
    read(j, "delay", s.delay);
    read(j, "rates", s.rates);
    read(j, "byzantine", s.byzantine);
    read(j, "seed", s.seed);
    read(j, "duration", s.duration);
    read(j, "clock_update_period", s.clock_update_period);
    read(j, "probe_period", s.probe_period);
    read(j, "regain_hold", s.regain_hold);
    read(j, "clock_algorithm", s.clock_algorithm);
    read(j, "record_update_deliveries", s.record_update_deliveries);
    if (j.contains("corruption")) {
      const auto& c = j.at("corruption");
      if (c.is_boolean()) {
        s.corruption.enabled = c.get<bool>();
        s.corruption.seed = s.seed;
      } else {
        s.corruption.enabled = c.value("enabled", true);
        s.corruption.seed = c.value("seed", s.seed);
      }
    }
    if (j.contains("script"))
      for (const auto& e : j.at("script")) s.script.push_back({e.at("node").get<NodeId>(), e.at("time").get<double>()});
    if (j.contains("initiations")) {
      const auto& p = j.at("initiations");
      if (p.is_boolean()) {
        s.initiations.enabled = p.get<bool>();
      } else {
        s.initiations.enabled = p.value("enabled", true);
        s.initiations.warmup = p.value("warmup", s.initiations.warmup);
        s.initiations.min_gap = p.value("min_gap", s.initiations.min_gap);
        s.initiations.max_gap = p.value("max_gap", s.initiations.max_gap);
      }
    }
  } catch (const json::exception& e) {
    problems.push_back(std::string("malformed value: ") + e.what());
  }
  if (!problems.empty()) throw ScenarioError(problems);
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["n"] = s.n;
  j["f"] = s.f;
  j["theta"] = s.theta;
  j["d"] = s.d;
  j["T"] = s.T;
  if (s.R) j["R"] = *s.R;
  j["protocol"] = s.protocol;
  j["adversary"] = s.adversary;
  if (s.delay) j["delay"] = *s.delay;
  if (s.rates) j["rates"] = *s.rates;
  if (!s.byzantine.empty()) j["byzantine"] = s.byzantine;
  j["seed"] = s.seed;
  j["duration"] = s.duration;
  j["clock_update_period"] = s.clock_update_period;
  j["corruption"] = {{"enabled", s.corruption.enabled}, {"seed", s.corruption.seed}};
  json script = json::array();
  for (const auto& e : s.script) script.push_back({{"node", e.node}, {"time", e.time}});
  j["script"] = script;
  j["initiations"] = {{"enabled", s.initiations.enabled},
                      {"warmup", s.initiations.warmup},
                      {"min_gap", s.initiations.min_gap},
                      {"max_gap", s.initiations.max_gap}};
  j["probe_period"] = s.probe_period;
  if (s.regain_hold) j["regain_hold"] = *s.regain_hold;
  j["clock_algorithm"] = s.clock_algorithm;
  j["record_update_deliveries"] = s.record_update_deliveries;
  return j;
}

Resolved resolve(const Scenario& s) {
  std::vector<std::string> problems;
  if (s.n < 1) problems.push_back("n must be positive");
  if (s.f < 0) problems.push_back("f must be non-negative");
  if (3 * s.f >= s.n) problems.push_back("resilience requires f < n/3 (n=" + std::to_string(s.n) + ", f=" + std::to_string(s.f) + ")");
  if (s.d != 1.0) problems.push_back("d is the time unit and must be 1");
  int theta_milli = 0;
  try {
    theta_milli = parse_theta_milli(s.theta);
  } catch (const ModelError& e) {
    problems.push_back(e.what());
  }
  if (theta_milli > 0) {
    const double min_t = 2.0 * theta_milli * theta_milli / 1e6;
    if (s.T < min_t) problems.push_back("T must be at least 2*theta^2*d = " + std::to_string(min_t));
  }
  if (s.protocol != "phase-king") problems.push_back("unknown protocol '" + s.protocol + "' (available: phase-king)");
  const auto strategy = byz::parse_strategy(s.adversary);
  if (!strategy) problems.push_back("unknown adversary '" + s.adversary + "'");
  std::optional<byz::DelayKind> delay;
  std::optional<byz::RateKind> rates;
  if (strategy) {
    delay = byz::conditions_for(*strategy).delay;
    rates = byz::conditions_for(*strategy).rate;
  }
  if (s.delay) {
    delay = byz::parse_delay_kind(*s.delay);
    if (!delay) problems.push_back("unknown delay policy '" + *s.delay + "'");
  }
  if (s.rates) {
    rates = byz::parse_rate_kind(*s.rates);
    if (!rates) problems.push_back("unknown rate policy '" + *s.rates + "'");
  }
  if (s.duration <= 0) problems.push_back("duration must be positive");
  if (s.clock_update_period < 1) problems.push_back("clock_update_period must be a positive integer");
  if (s.probe_period < 0) problems.push_back("probe_period must be non-negative");
  if (s.clock_algorithm != "self-stabilizing" && s.clock_algorithm != "simple")
    problems.push_back("clock_algorithm must be 'self-stabilizing' or 'simple'");
  if (s.initiations.min_gap < 1.0 || s.initiations.max_gap < s.initiations.min_gap)
    problems.push_back("initiation gaps must satisfy 1 <= min_gap <= max_gap (in multiples of T)");
  if (static_cast<int>(s.byzantine.size()) > s.f) problems.push_back("more byzantine nodes than f");
  for (NodeId b : s.byzantine)
    if (b < 0 || b >= s.n) problems.push_back("byzantine node " + std::to_string(b) + " out of range");
  for (const auto& e : s.script) {
    if (e.node < 0 || e.node >= s.n) problems.push_back("script node " + std::to_string(e.node) + " out of range");
    if (e.time < 0 || e.time > s.duration) problems.push_back("script time outside the run");
  }
  const int rounds = s.f >= 0 ? silent_rounds(s.n, s.f) : 0;
  if (s.R && *s.R != rounds)
    problems.push_back("R=" + std::to_string(*s.R) + " does not match the wrapped protocol's " +
                       std::to_string(rounds) + " rounds");
  if (s.duration <= 10.0 * (rounds + s.T))
    problems.push_back("duration must exceed the stabilization time 10*(R+T) = " +
                       std::to_string(10.0 * (rounds + s.T)));
  if (!problems.empty()) throw ScenarioError(problems);

  SystemParams p;
  p.n = s.n;
  p.f = s.f;
  p.theta_milli = theta_milli;
  p.clock_period = s.clock_update_period;
  p.rate_limit = LocalTime::from_d(s.T);
  p.rounds = rounds;
  p.payload_bits = static_cast<std::int64_t>(3 * (s.f + 1)) * s.n + 2 * s.n;
  if (s.regain_hold) p.regain_hold_override = LocalTime::from_d(*s.regain_hold);
  p.clock_algorithm = s.clock_algorithm == "simple" ? ClockAlgorithm::kSimple : ClockAlgorithm::kSelfStabilizing;

  Resolved r{derive_constants(p), *strategy, *delay, *rates, std::vector<bool>(static_cast<std::size_t>(s.n), false)};
  if (!s.byzantine.empty()) {
    for (NodeId b : s.byzantine) r.faulty[static_cast<std::size_t>(b)] = true;
  } else {
    std::mt19937_64 rng(s.seed * 0x9E3779B97F4A7C15ULL + 17);
    int chosen = 0;
    while (chosen < s.f) {
      const auto v = static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(s.n));
      if (!r.faulty[v]) {
        r.faulty[v] = true;
        ++chosen;
      }
    }
  }
  return r;
}

double stabilization_time(const Scenario& s, const Constants& c) {
  return 10.0 * (c.params.rounds + s.T);
}

Scenario acceptance_scenario(int n, const std::string& theta, byz::Strategy adversary, std::uint64_t seed) {
  Scenario s;
  s.n = n;
  s.f = (n - 1) / 3;
  s.theta = theta;
  s.adversary = byz::strategy_name(adversary);
  s.seed = seed;
  s.T = 100;
  s.duration = 1e6;
  const Constants c = resolve(s).constants;
  s.T = std::ceil((c.regain_hold.in_d() + 150.0) / 10.0);
  const double S = stabilization_time(s, c);
  s.duration = std::ceil(S + 10.0 * s.T + 100.0);
  s.initiations.warmup = 20;
  return s;
}

}  // namespace nic::harness
