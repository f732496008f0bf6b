#include "nic/harness/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include "nic/silent/phase_king.hpp"
#include "nic/silent/silent.hpp"

namespace nic::harness {

namespace {

std::string tag(int n, const std::string& theta, byz::Strategy s, std::uint64_t seed) {
  return "n" + std::to_string(n) + "-t" + theta + "-" + byz::strategy_name(s) + "-s" + std::to_string(seed);
}

}  // namespace

bool SweepReport::pass() const {
  return std::all_of(runs.begin(), runs.end(), [](const RunSummary& r) { return r.verdict.pass(); });
}

std::vector<std::string> SweepReport::failures() const {
  std::vector<std::string> out;
  for (const auto& r : runs)
    for (const auto& c : r.verdict.checks)
      if (!c.pass) out.push_back(r.id + "/" + c.id);
  return out;
}

nlohmann::json SweepReport::to_json() const {
  nlohmann::json runs_json = nlohmann::json::array();
  for (const auto& r : runs)
    runs_json.push_back({{"id", r.id},
                         {"group", r.group},
                         {"pass", r.verdict.pass()},
                         {"seconds", r.seconds},
                         {"scenario", scenario_to_json(r.scenario)},
                         {"verdict", r.verdict.to_json()}});
  return {{"pass", pass()}, {"seconds", seconds}, {"failures", failures()}, {"runs", runs_json}};
}

std::vector<RunSummary> plan_sweep(const SweepConfig& cfg) {
  std::vector<RunSummary> out;
  for (int n : cfg.sizes)
    for (const auto& theta : cfg.thetas)
      for (auto adv : cfg.adversaries)
        for (int seed = 1; seed <= cfg.seeds; ++seed)
          out.push_back({tag(n, theta, adv, seed), "clean", acceptance_scenario(n, theta, adv, seed), {}, 0});

  // Corrupted boots cycle through every configuration.
  std::size_t combos = cfg.sizes.size() * cfg.thetas.size() * cfg.adversaries.size();
  for (int i = 0; i < cfg.corrupted_runs && combos > 0; ++i) {
    std::size_t k = static_cast<std::size_t>(i) % combos;
    const auto adv = cfg.adversaries[k % cfg.adversaries.size()];
    k /= cfg.adversaries.size();
    const auto& theta = cfg.thetas[k % cfg.thetas.size()];
    const int n = cfg.sizes[k / cfg.thetas.size()];
    const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(i);
    Scenario s = acceptance_scenario(n, theta, adv, seed);
    s.corruption = {true, seed * 7919 + 17};
    out.push_back({"corrupt-" + tag(n, theta, adv, seed), "corrupted", s, {}, 0});
  }

  if (cfg.infra_runs)
    for (int n : cfg.sizes)
      for (const auto& theta : cfg.thetas) {
        Scenario s = acceptance_scenario(n, theta, byz::Strategy::kSpam, 1);
        s.initiations.enabled = false;
        out.push_back({"infra-" + tag(n, theta, byz::Strategy::kSpam, 1), "infra", s, {}, 0});
      }
  return out;
}

RunSummary run_one(RunSummary planned, const Ceilings& ceilings) {
  const auto start = std::chrono::steady_clock::now();
  const RunResult run = run_scenario(planned.scenario);
  planned.verdict = evaluate(run, ceilings);
  planned.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return planned;
}

SweepReport run_sweep(const SweepConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  SweepReport report;
  auto plan = plan_sweep(cfg);
  report.runs.resize(plan.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < plan.size(); i = next++) {
      report.runs[i] = run_one(std::move(plan[i]), cfg.ceilings);
      const std::size_t k = ++done;
      if (cfg.progress) {
        const auto& r = report.runs[i];
        std::lock_guard lock(progress_mutex);
        cfg.progress(std::to_string(k) + "/" + std::to_string(plan.size()) + " " + r.id + " " +
                     (r.verdict.pass() ? "ok" : "FAIL"));
      }
    }
  };
  const unsigned jobs = std::max(1U, cfg.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

bool BruteForceVerdict::pass() const {
  return plain.agreement_violations == 0 && plain.validity_violations == 0 && wrapped.agreement_violations == 0 &&
         wrapped.validity_violations == 0 && plain.terminal_states > 0 && wrapped.terminal_states > 0;
}

BruteForceVerdict brute_force_phase_king() {
  const std::vector<std::optional<Payload>> alphabet{std::nullopt, Payload::single(false), Payload::single(true)};
  auto king = std::make_shared<silent::PhaseKing>(4, 1);
  return {silent::brute_force(*king, alphabet), silent::brute_force(silent::SilentProtocol(king), alphabet)};
}

}  // namespace nic::harness
