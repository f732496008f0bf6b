#include "nic/harness/run.hpp"

#include "nic/silent/phase_king.hpp"
#include "nic/silent/silent.hpp"

namespace nic::harness {

namespace {
std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

node::InputOracle make_oracle(std::uint64_t seed) {
  return [seed](NodeId self, const InstanceLabel& label) {
    const std::uint64_t h = mix(seed ^ mix(static_cast<std::uint64_t>(label.stamp.value) * 31 +
                                           static_cast<std::uint64_t>(label.initiator)));
    const auto cls = h % 10;
    if (cls < 3) return 1;
    if (cls < 6) return 0;
    return static_cast<int>(mix(h ^ static_cast<std::uint64_t>(self + 1)) & 1U);
  };
}

std::shared_ptr<const silent::Protocol> make_protocol(const Scenario& s) {
  return std::make_shared<silent::SilentProtocol>(std::make_shared<silent::PhaseKing>(s.n, s.f));
}

RunResult run_scenario(const Scenario& s) {
  RunResult out{s, resolve(s), {}, 0};
  const Constants& c = out.resolved.constants;
  out.stabilization = stabilization_time(s, c);
  const auto protocol = make_protocol(s);
  const auto oracle = make_oracle(s.seed);
  const RealTime horizon = RealTime::from_d(s.duration);

  sim::Rng rng(s.seed);
  auto clocks = byz::make_clocks(out.resolved.rates, s.n, c.params.theta_milli, LocalTime{2 * c.modulus}, horizon, rng);
  if (out.resolved.strategy == byz::Strategy::kClockLiar)
    for (NodeId v = 0; v < s.n; ++v)
      if (out.resolved.faulty[v]) clocks[v] = sim::HardwareClock(clocks[v].at(RealTime{0}), 1000);

  std::vector<std::unique_ptr<sim::Process>> procs;
  for (NodeId v = 0; v < s.n; ++v) {
    if (out.resolved.faulty[v]) {
      byz::ByzantineSetup setup{c, v, protocol, oracle, mix(s.seed ^ static_cast<std::uint64_t>(v + 101))};
      procs.push_back(byz::make_byzantine(out.resolved.strategy, setup));
    } else {
      auto node = std::make_unique<node::CorrectNode>(c, v, protocol, oracle);
      if (c.params.clock_algorithm == ClockAlgorithm::kSimple) {
        std::vector<Stamp> initial;
        for (NodeId w = 0; w < s.n; ++w) {
          const std::int64_t h = clocks[w].at(RealTime{0}).units - 1;
          const std::int64_t p = c.tick_period.units;
          initial.push_back(wrap((h >= 0 ? h / p : -ceil_div(-h, p)) * p, c.modulus));
        }
        node->clock().bootstrap(initial);
      }
      procs.push_back(std::move(node));
    }
  }

  sim::KernelConfig kc;
  kc.n = s.n;
  kc.seed = mix(s.seed ^ 0xde1a7U);
  kc.delay = byz::make_delay_policy(out.resolved.delay, s.n, s.seed);
  kc.probe_period = RealTime::from_d(s.probe_period);
  kc.record_update_deliveries = s.record_update_deliveries;
  sim::Kernel kernel(kc, std::move(clocks), std::move(procs), WireFormat(c));

  if (s.corruption.enabled) corrupt(kernel, out.resolved, *protocol, s.corruption.seed);

  for (const auto& e : s.script) kernel.command(e.node, RealTime::from_d(e.time), sim::Command{});
  if (s.initiations.enabled) {
    sim::Rng plan(mix(s.seed ^ 0x1a17U));
    std::uniform_real_distribution<double> first(0.0, s.T);
    std::uniform_real_distribution<double> gap(s.initiations.min_gap, s.initiations.max_gap);
    for (NodeId v = 0; v < s.n; ++v)
      for (double t = s.initiations.warmup + first(plan); t < s.duration; t += gap(plan) * s.T)
        kernel.command(v, RealTime::from_d(t), sim::Command{});
  }

  kernel.run_until(horizon);
  out.trace = kernel.take_trace();
  return out;
}

}  // namespace nic::harness
