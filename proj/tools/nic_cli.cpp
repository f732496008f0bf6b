// nic: run scenarios, sweeps and trace checks for the consensus simulator.
//
//   nic run scenario.json [--trace out.trace] [--verdict out.json] [--metrics 100]
//   nic sweep [--sizes 4,7,10] [--thetas 1.0,1.1] [--seeds 20] [--adversaries crash,spam] [--out report.json]
//   nic check-trace scenario.json run.trace
//   nic explain <run-id>/<check-id> [--report report.json]
//
// Scenario keys can also be given as flags (--n 7 --adversary spam ...), which
// override the file. Every subcommand exits nonzero iff a verdict fails.

#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "nic/harness/sweep.hpp"

using namespace nic;
using namespace nic::harness;
using nlohmann::json;

namespace {

struct ScenarioFlags {
  std::optional<int> n, f, clock_update_period;
  std::optional<std::string> theta, adversary, delay, rates, clock_algorithm;
  std::optional<double> T, duration, probe_period, regain_hold;
  std::optional<std::uint64_t> seed, corruption_seed;
  bool no_initiations{false};
  std::vector<std::string> script;  // "node@time"

  void attach(CLI::App* app) {
    app->add_option("--n", n, "number of nodes");
    app->add_option("--f", f, "fault bound (default floor((n-1)/3))");
    app->add_option("--theta", theta, "clock drift bound, e.g. 1.1");
    app->add_option("--T", T, "initiation rate limit in d");
    app->add_option("--adversary", adversary, "crash|equivocate|split-echo|clock-liar|spam");
    app->add_option("--delay", delay, "delay policy override");
    app->add_option("--rates", rates, "clock rate policy override");
    app->add_option("--seed", seed, "simulation seed");
    app->add_option("--duration", duration, "run length in d");
    app->add_option("--clock-update-period", clock_update_period, "d' in multiples of d");
    app->add_option("--probe-period", probe_period, "clock probe period in d");
    app->add_option("--regain-hold", regain_hold, "trust regain timeout override in d");
    app->add_option("--clock-algorithm", clock_algorithm, "self-stabilizing|simple");
    app->add_option("--corrupt", corruption_seed, "corrupt the boot state with this seed");
    app->add_flag("--no-initiations", no_initiations, "disable the periodic initiation plan");
    app->add_option("--initiate", script, "scripted initiation node@time (repeatable)");
  }

  void apply(json& j) const {
    if (n) j["n"] = *n;
    if (f) j["f"] = *f;
    if (n && !f) j.erase("f");
    if (theta) j["theta"] = *theta;
    if (T) j["T"] = *T;
    if (adversary) j["adversary"] = *adversary;
    if (delay) j["delay"] = *delay;
    if (rates) j["rates"] = *rates;
    if (seed) j["seed"] = *seed;
    if (duration) j["duration"] = *duration;
    if (clock_update_period) j["clock_update_period"] = *clock_update_period;
    if (probe_period) j["probe_period"] = *probe_period;
    if (regain_hold) j["regain_hold"] = *regain_hold;
    if (clock_algorithm) j["clock_algorithm"] = *clock_algorithm;
    if (corruption_seed) j["corruption"] = {{"enabled", true}, {"seed", *corruption_seed}};
    if (no_initiations) j["initiations"] = {{"enabled", false}};
    for (const auto& e : script) {
      const auto at = e.find('@');
      if (at == std::string::npos) throw CLI::ValidationError("--initiate", "expected node@time, got " + e);
      j["script"].push_back({{"node", std::stoi(e.substr(0, at))}, {"time", std::stod(e.substr(at + 1))}});
    }
  }
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

Scenario load_scenario(const std::string& path, const ScenarioFlags& flags) {
  json j = path.empty() ? json::object() : load_json(path);
  flags.apply(j);
  return scenario_from_json(j);
}

void print_verdict(const Verdict& v, std::ostream& os) {
  for (const auto& c : v.checks) {
    os << (c.pass ? "PASS " : "FAIL ") << c.id << " (" << c.examined << " examined) " << c.measured.dump() << '\n';
    for (const auto& why : c.counterexamples) os << "    " << why << '\n';
  }
  os << "S bound " << v.stabilization_bound << "d, measured " << v.measured_stabilization << "d\n";
}

int cmd_run(const std::string& path, const ScenarioFlags& flags, const std::string& trace_out,
            const std::string& verdict_out, double metrics_window) {
  const Scenario s = load_scenario(path, flags);
  const RunResult run = run_scenario(s);
  const Verdict v = evaluate(run);
  if (!trace_out.empty()) {
    std::ofstream out(trace_out);
    sim::write_trace(out, run.trace);
  }
  if (!verdict_out.empty())
    write_file(verdict_out, json{{"scenario", scenario_to_json(s)}, {"verdict", v.to_json()}}.dump(1) + "\n");
  if (metrics_window > 0) std::cout << format_metrics(metrics(run, metrics_window));
  std::cout << run.trace.size() << " trace records, digest " << std::hex << sim::trace_digest(run.trace) << std::dec
            << '\n';
  print_verdict(v, std::cout);
  return v.pass() ? 0 : 1;
}

int cmd_check_trace(const std::string& scenario_path, const std::string& trace_path, const ScenarioFlags& flags) {
  const Scenario s = load_scenario(scenario_path, flags);
  RunResult run{s, resolve(s), {}, 0};
  run.stabilization = stabilization_time(s, run.resolved.constants);
  std::ifstream in(trace_path);
  if (!in) throw std::runtime_error("cannot open " + trace_path);
  run.trace = sim::read_trace(in);
  const Verdict v = evaluate(run);
  print_verdict(v, std::cout);
  return v.pass() ? 0 : 1;
}

template <typename T>
std::vector<T> split(const std::string& text, T (*parse)(const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(parse(item));
  return out;
}

int cmd_sweep(const std::string& sizes, const std::string& thetas, int seeds, const std::string& adversaries,
              int corrupted, bool infra, unsigned jobs, const std::string& out_path) {
  SweepConfig cfg;
  if (!sizes.empty()) cfg.sizes = split<int>(sizes, [](const std::string& s) { return std::stoi(s); });
  if (!thetas.empty()) cfg.thetas = split<std::string>(thetas, [](const std::string& s) { return s; });
  if (!adversaries.empty())
    cfg.adversaries = split<byz::Strategy>(adversaries, [](const std::string& s) {
      const auto st = byz::parse_strategy(s);
      if (!st) throw std::runtime_error("unknown adversary " + s);
      return *st;
    });
  cfg.seeds = seeds;
  cfg.corrupted_runs = corrupted;
  cfg.infra_runs = infra;
  cfg.jobs = jobs;
  cfg.progress = [](const std::string& msg) { std::cerr << msg << '\n'; };
  const SweepReport report = run_sweep(cfg);
  write_file(out_path, report.to_json().dump(1) + "\n");

  // Aggregated pass rates and worst measured constants per check.
  std::map<std::string, std::pair<int, int>> rate;
  std::map<std::string, double> worst;
  for (const auto& r : report.runs)
    for (const auto& c : r.verdict.checks) {
      auto& [ok, all] = rate[c.id];
      ++all;
      ok += c.pass ? 1 : 0;
      for (const auto& [k, v] : c.measured.items())
        if (v.is_number()) worst[c.id + "." + k] = std::max(worst[c.id + "." + k], v.get<double>());
    }
  std::cout << "check | passed | runs\n";
  for (const auto& [id, pr] : rate) std::cout << id << " | " << pr.first << " | " << pr.second << '\n';
  std::cout << "worst measured:";
  for (const auto& [k, v] : worst) std::cout << ' ' << k << '=' << v;
  std::cout << '\n' << report.runs.size() << " runs in " << report.seconds << "s, verdicts in " << out_path << '\n';
  for (const auto& id : report.failures()) std::cout << "failed: " << id << '\n';
  return report.pass() ? 0 : 1;
}

int cmd_explain(const std::string& verdict_id, const std::string& report_path) {
  const auto slash = verdict_id.rfind('/');
  if (slash == std::string::npos) throw std::runtime_error("verdict id must look like <run-id>/<check-id>");
  const std::string run_id = verdict_id.substr(0, slash);
  const std::string check_id = verdict_id.substr(slash + 1);
  const json report = load_json(report_path);
  const json* runs = report.contains("runs") ? &report.at("runs") : nullptr;
  json single;
  if (!runs) {  // a verdict file written by `nic run --verdict`
    single = json::array({{{"id", run_id}, {"scenario", report.at("scenario")}, {"verdict", report.at("verdict")}}});
    runs = &single;
  }
  for (const auto& r : *runs) {
    if (r.at("id") != run_id) continue;
    std::cout << "run " << run_id << "\nscenario " << r.at("scenario").dump() << '\n';
    for (const auto& c : r.at("verdict").at("checks")) {
      if (c.at("id") != check_id) continue;
      std::cout << (c.at("pass").get<bool>() ? "PASS " : "FAIL ") << check_id << ": " << c.at("title").get<std::string>()
                << "\nmeasured " << c.at("measured").dump() << '\n';
      for (const auto& why : c.at("counterexamples")) std::cout << "  " << why.get<std::string>() << '\n';
      if (c.contains("slice")) {
        std::cout << "trace slice:\n";
        for (const auto& line : c.at("slice")) std::cout << "  " << line.get<std::string>() << '\n';
      }
      return c.at("pass").get<bool>() ? 0 : 1;
    }
    throw std::runtime_error("run " + run_id + " has no check " + check_id);
  }
  throw std::runtime_error("no run " + run_id + " in " + report_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator for node-initiated self-stabilizing Byzantine consensus"};
  app.require_subcommand(1);

  ScenarioFlags run_flags;
  std::string run_path, trace_out, verdict_out;
  double metrics_window = 0;
  auto* run = app.add_subcommand("run", "run one scenario and evaluate every property on its trace");
  run->add_option("scenario", run_path, "scenario JSON file (defaults apply when omitted)");
  run->add_option("--trace", trace_out, "write the trace here");
  run->add_option("--verdict", verdict_out, "write the verdict JSON here");
  run->add_option("--metrics", metrics_window, "print per-node metrics over windows of this many d");
  run_flags.attach(run);

  std::string sizes, thetas, adversaries, sweep_out = "sweep_report.json";
  int seeds = 20, corrupted = 100;
  bool no_infra = false;
  unsigned jobs = std::max(1U, std::thread::hardware_concurrency());
  auto* sweep = app.add_subcommand("sweep", "run the acceptance cross product and report verdicts");
  sweep->add_option("--sizes", sizes, "comma-separated n values (default 4,7,10)");
  sweep->add_option("--thetas", thetas, "comma-separated drift bounds (default 1.0,1.1)");
  sweep->add_option("--seeds", seeds, "seeds per configuration");
  sweep->add_option("--adversaries", adversaries, "comma-separated strategies (default all)");
  sweep->add_option("--corrupted", corrupted, "number of corrupted-boot runs");
  sweep->add_flag("--no-infra", no_infra, "skip the initiation-free bit accounting runs");
  sweep->add_option("--jobs", jobs, "runs evaluated concurrently");
  sweep->add_option("--out", sweep_out, "verdict report path");

  ScenarioFlags check_flags;
  std::string check_scenario, check_trace;
  auto* check = app.add_subcommand("check-trace", "evaluate every property on a recorded trace");
  check->add_option("scenario", check_scenario, "scenario the trace was produced from")->required();
  check->add_option("trace", check_trace, "trace file")->required();
  check_flags.attach(check);

  std::string explain_id, report_path = "sweep_report.json";
  auto* explain = app.add_subcommand("explain", "show a verdict's counterexamples and trace slice");
  explain->add_option("verdict-id", explain_id, "<run-id>/<check-id>, e.g. n4-t1.1-spam-s3/timing")->required();
  explain->add_option("--report", report_path, "sweep report or verdict file");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_path, run_flags, trace_out, verdict_out, metrics_window);
    if (*sweep) return cmd_sweep(sizes, thetas, seeds, adversaries, corrupted, !no_infra, jobs, sweep_out);
    if (*check) return cmd_check_trace(check_scenario, check_trace, check_flags);
    if (*explain) return cmd_explain(explain_id, report_path);
  } catch (const ScenarioError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
