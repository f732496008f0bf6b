#include "nic/harness/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "nic/silent/lockstep.hpp"

namespace nic::harness {

using sim::EndReason;
using sim::TraceEvent;
using sim::TraceKind;
using Cell = std::optional<std::optional<Payload>>;

namespace {

constexpr std::size_t kMaxExamples = 8;

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

std::string where(const InstanceView& inst) { return "instance " + to_string(inst.label); }

NodeView blank_view(int rounds, int n) {
  NodeView v;
  v.inbox.assign(static_cast<std::size_t>(rounds) + 1, std::vector<Cell>(static_cast<std::size_t>(n)));
  v.sent.assign(static_cast<std::size_t>(rounds) + 1, std::vector<Cell>(static_cast<std::size_t>(n)));
  return v;
}

bool correct(const Resolved& r, NodeId v) { return v >= 0 && v < static_cast<NodeId>(r.faulty.size()) && !r.faulty[v]; }

int phase_king_rounds(const Resolved& r) { return 3 * (r.constants.params.f + 1); }

double d_local(const Constants& c) { return static_cast<double>(c.d.units); }

}  // namespace

std::optional<RealTime> InstanceView::last_end() const {
  std::optional<RealTime> last;
  for (const auto& [v, nv] : nodes)
    if (nv.ended && (!last || *nv.ended > *last)) last = nv.ended;
  return last;
}

bool InstanceView::any_nonzero_input() const {
  return std::any_of(nodes.begin(), nodes.end(), [](const auto& kv) { return kv.second.input != 0; });
}

void Check::fail(const std::string& why) {
  pass = false;
  if (counterexamples.size() < kMaxExamples) counterexamples.push_back(why);
}

void Check::fail(const std::string& why, const InstanceLabel& at) {
  if (pass && !focus_time) focus_label = at;
  fail(why);
}

void Check::fail(const std::string& why, RealTime at) {
  if (pass && !focus_label) focus_time = at;
  fail(why);
}

bool Verdict::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* Verdict::find(const std::string& id) const {
  for (const auto& c : checks)
    if (c.id == id) return &c;
  return nullptr;
}

nlohmann::json Verdict::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json j{{"id", c.id},
                     {"title", c.title},
                     {"pass", c.pass},
                     {"examined", c.examined},
                     {"measured", c.measured},
                     {"counterexamples", c.counterexamples}};
    if (c.focus_label) j["focus_label"] = to_string(*c.focus_label);
    if (c.focus_time) j["focus_time"] = c.focus_time->in_d();
    if (!c.slice.empty()) j["slice"] = c.slice;
    out.push_back(std::move(j));
  }
  return {{"stabilization_bound", stabilization_bound},
          {"measured_stabilization", measured_stabilization},
          {"pass", pass()},
          {"checks", out}};
}

TraceIndex index_trace(const sim::Trace& trace, const Resolved& r) {
  const int rounds = r.constants.params.rounds;
  const int n = r.constants.params.n;
  TraceIndex idx;
  std::map<InstanceLabel, std::size_t> slot;
  auto instance = [&](const InstanceLabel& l) -> InstanceView& {
    auto [it, fresh] = slot.try_emplace(l, idx.instances.size());
    if (fresh) idx.instances.push_back(InstanceView{l, std::nullopt, {}});
    return idx.instances[it->second];
  };
  auto view = [&](const TraceEvent& ev) -> NodeView* {
    auto it = slot.find(ev.label);
    if (it == slot.end()) return nullptr;
    auto& nodes = idx.instances[it->second].nodes;
    auto nit = nodes.find(ev.node);
    return nit == nodes.end() ? nullptr : &nit->second;
  };
  auto in_range = [&](int round) { return round >= 1 && round <= rounds; };

  for (const auto& ev : trace) {
    if (!correct(r, ev.node)) continue;
    switch (ev.kind) {
      case TraceKind::kInitiate: {
        auto& inst = instance(ev.label);
        if (!inst.initiated) inst.initiated = ev.time;
        break;
      }
      case TraceKind::kJoin: {
        auto& inst = instance(ev.label);
        if (inst.nodes.count(ev.node)) break;  // a rejoin after collection keeps the first record
        NodeView nv = blank_view(rounds, n);
        nv.joined = ev.time;
        nv.input = ev.value;
        nv.confidence = ev.aux;
        inst.nodes.emplace(ev.node, std::move(nv));
        break;
      }
      case TraceKind::kCross:
        if (auto* nv = view(ev); nv && !nv->ended) nv->crossed.try_emplace(ev.round, ev.time);
        break;
      case TraceKind::kStore:
        if (auto* nv = view(ev); nv && !nv->ended && in_range(ev.round) && !nv->crossed.count(ev.round + 1) &&
                                 ev.peer >= 0 && ev.peer < n) {
          auto& cell = nv->inbox[static_cast<std::size_t>(ev.round)][static_cast<std::size_t>(ev.peer)];
          if (!cell) cell = ev.payload.restore();
        }
        break;
      case TraceKind::kSend:
        if (ev.msg != MsgKind::kRound) break;
        if (auto* nv = view(ev); nv && in_range(ev.round) && ev.peer >= 0 && ev.peer < n) {
          auto& cell = nv->sent[static_cast<std::size_t>(ev.round)][static_cast<std::size_t>(ev.peer)];
          if (!cell) cell = ev.payload.restore();
        }
        break;
      case TraceKind::kOutput:
        if (auto* nv = view(ev); nv && !nv->ended) {
          nv->ended = ev.time;
          nv->output = ev.value;
          nv->reason = static_cast<EndReason>(ev.aux);
        }
        break;
      default:
        break;
    }
  }
  // Own frames count as sent to self.
  for (auto& inst : idx.instances)
    for (auto& [v, nv] : inst.nodes)
      for (int rd = 1; rd <= rounds; ++rd)
        if (nv.crossed.count(rd)) nv.sent[rd][v] = nv.inbox[rd][v];
  return idx;
}

std::optional<RealTime> InstanceView::first_join() const {
  std::optional<RealTime> first;
  for (const auto& [v, nv] : nodes)
    if (!first || nv.joined < *first) first = nv.joined;
  return first;
}

std::vector<const InstanceView*> instances_after(const TraceIndex& idx, RealTime after, RealTime horizon,
                                                 RealTime lifetime) {
  std::vector<const InstanceView*> out;
  for (const auto& inst : idx.instances) {
    const auto join = inst.first_join();
    if (!join || *join + lifetime >= horizon) continue;  // may still be running when the run ends
    const RealTime end = inst.last_end().value_or(*join + lifetime);
    if (end > after) out.push_back(&inst);
  }
  return out;
}

namespace {

// A clean boot is one more initial state, so every run is judged after S.
std::vector<const InstanceView*> scope(const RunResult& run, const TraceIndex& idx) {
  // Rates are at least 1, so an instance's local lifetime bounds its real one.
  const RealTime lifetime = RealTime::from_d(run.resolved.constants.tau_inst.in_d() + 1.0);
  return instances_after(idx, RealTime::from_d(run.stabilization), RealTime::from_d(run.scenario.duration), lifetime);
}

// Mismatch descriptions for one instance; empty when it maps onto a
// lock-step execution.
std::vector<std::string> oracle_mismatches(const RunResult& run, const InstanceView& inst,
                                           const silent::Protocol& protocol) {
  std::vector<std::string> out;
  const Resolved& r = run.resolved;
  const int n = r.constants.params.n;
  const int rounds = r.constants.params.rounds;

  // Every correct participant must reach the end of the run normally.
  for (const auto& [v, nv] : inst.nodes) {
    if (!nv.ended) {
      out.push_back(where(inst) + ": node " + std::to_string(v) + " never terminated");
      continue;
    }
    if (nv.reason != EndReason::kNormal)
      out.push_back(where(inst) + ": node " + std::to_string(v) + " ended with reason " +
                    std::to_string(static_cast<int>(nv.reason)));
  }
  if (!out.empty()) return out;

  // Each correct node behaves as the protocol does on the inboxes it used.
  for (const auto& [v, nv] : inst.nodes) {
    std::vector<silent::Inbox> inboxes;
    for (int rd = 1; rd <= rounds; ++rd) {
      silent::Inbox in(static_cast<std::size_t>(n));
      for (NodeId u = 0; u < n; ++u)
        if (const auto& cell = nv.inbox[rd][u]) in[u] = *cell;
      inboxes.push_back(std::move(in));
    }
    const auto replay = silent::replay_node(protocol, v, nv.input, inboxes);
    for (int rd = 1; rd <= rounds; ++rd)
      for (NodeId w = 0; w < n; ++w) {
        const auto& expect = replay.sent[rd - 1].size() > static_cast<std::size_t>(w) ? replay.sent[rd - 1][w]
                                                                                      : std::optional<Payload>{};
        const Cell& got = nv.sent[rd][w];
        if (!got || *got != expect)
          out.push_back(where(inst) + ": node " + std::to_string(v) + " round " + std::to_string(rd) + " to " +
                        std::to_string(w) + (got ? " sent a frame the replay does not" : " sent nothing"));
      }
    if (replay.output != nv.output)
      out.push_back(where(inst) + ": node " + std::to_string(v) + " output " + std::to_string(nv.output) +
                    ", replay gives " + std::to_string(replay.output));
  }

  // Correct-to-correct frames arrive in the round they were sent for.
  for (const auto& [v, nv] : inst.nodes)
    for (NodeId u = 0; u < n; ++u) {
      if (!correct(r, u) || u == v) continue;
      auto su = inst.nodes.find(u);
      for (int rd = 1; rd <= rounds; ++rd) {
        const Cell sent = su == inst.nodes.end() ? Cell{} : su->second.sent[rd][v];
        const Cell& used = nv.inbox[rd][u];
        if (sent != used)
          out.push_back(where(inst) + ": node " + std::to_string(v) + " round " + std::to_string(rd) +
                        " used a different frame from correct node " + std::to_string(u) + " than was sent");
      }
    }

  // The lock-step executor, fed the recorded faulty frames, agrees.
  silent::LockstepConfig cfg;
  cfg.inputs.assign(static_cast<std::size_t>(n), 0);
  cfg.faulty = r.faulty;
  cfg.participates.assign(static_cast<std::size_t>(n), false);
  for (const auto& [v, nv] : inst.nodes) {
    cfg.inputs[v] = nv.input;
    cfg.participates[v] = true;
  }
  cfg.byzantine = [&inst](int round, NodeId from, NodeId to) -> std::optional<Payload> {
    auto it = inst.nodes.find(to);
    if (it == inst.nodes.end()) return std::nullopt;
    const Cell& cell = it->second.inbox[round][from];
    return cell ? *cell : std::nullopt;
  };
  const auto ls = silent::run_lockstep(protocol, cfg);
  for (const auto& [v, nv] : inst.nodes)
    if (!ls.outputs[v] || *ls.outputs[v] != nv.output)
      out.push_back(where(inst) + ": node " + std::to_string(v) + " output " + std::to_string(nv.output) +
                    " differs from the lock-step executor");
  return out;
}

}  // namespace

Check check_oracle_equivalence(const RunResult& run, const TraceIndex& idx) {
  Check c{"oracle", "replayed message matrix reproduces every output"};
  const auto protocol = make_protocol(run.scenario);
  std::int64_t mismatches = 0;
  for (const auto* inst : scope(run, idx)) {
    if (!inst->any_nonzero_input()) continue;
    ++c.examined;
    const auto bad = oracle_mismatches(run, *inst, *protocol);
    if (!bad.empty()) {
      ++mismatches;
      c.fail(bad.front(), inst->label);
    }
  }
  c.measured["mismatching_instances"] = mismatches;
  return c;
}

Check check_agreement(const RunResult& run, const TraceIndex& idx) {
  Check c{"agreement", "agreement, validity and safety"};
  const int n = run.resolved.constants.params.n;
  int correct_count = 0;
  for (NodeId v = 0; v < n; ++v) correct_count += correct(run.resolved, v) ? 1 : 0;
  for (const auto* inst : scope(run, idx)) {
    ++c.examined;
    std::optional<int> agreed;
    bool split = false;
    for (const auto& [v, nv] : inst->nodes) {
      if (!nv.ended) continue;
      if (agreed && *agreed != nv.output) split = true;
      if (!agreed) agreed = nv.output;
    }
    if (split) {
      c.fail(where(*inst) + ": correct outputs differ", inst->label);
      continue;
    }
    if (!agreed) continue;
    const bool everyone = static_cast<int>(inst->nodes.size()) == correct_count &&
                          std::all_of(inst->nodes.begin(), inst->nodes.end(),
                                      [](const auto& kv) { return kv.second.ended.has_value(); });
    const int first_input = inst->nodes.begin()->second.input;
    const bool unanimous = std::all_of(inst->nodes.begin(), inst->nodes.end(),
                                       [&](const auto& kv) { return kv.second.input == first_input; });
    if (everyone && unanimous && *agreed != first_input)
      c.fail(where(*inst) + ": unanimous input " + std::to_string(first_input) + " but output " +
             std::to_string(*agreed), inst->label);
    if (*agreed != 0) {
      if (!everyone) c.fail(where(*inst) + ": nonzero output without every correct node taking part", inst->label);
      const bool backed = std::any_of(inst->nodes.begin(), inst->nodes.end(), [&](const auto& kv) {
        return kv.second.confidence == 2 && kv.second.input == *agreed;
      });
      if (!backed) c.fail(where(*inst) + ": output " + std::to_string(*agreed) + " matches no correct input", inst->label);
    }
  }
  return c;
}

Check check_timing(const RunResult& run, const TraceIndex& idx, const Ceilings& ceil) {
  Check c{"timing", "participation, termination spread and duration windows"};
  const int n = run.resolved.constants.params.n;
  const int r_pk = phase_king_rounds(run.resolved);
  double k2 = 0, k5 = 0, min_len = 1e300, max_len = 0, min_join = 1e300;
  for (const auto* inst : scope(run, idx)) {
    if (!inst->initiated || !correct(run.resolved, inst->label.initiator)) continue;
    ++c.examined;
    const double t = inst->initiated->in_d();
    int present = 0;
    std::optional<double> first_end, last_end;
    for (const auto& [v, nv] : inst->nodes) {
      ++present;
      const double lag = nv.joined.in_d() - t;
      k2 = std::max(k2, lag);
      min_join = std::min(min_join, lag);
      if (lag < 2.0 || lag > ceil.k2)
        c.fail(where(*inst) + ": node " + std::to_string(v) + " joined " + fmt(lag) + "d after initiation", inst->label);
      if (nv.confidence != 2) c.fail(where(*inst) + ": node " + std::to_string(v) + " joined without full confidence", inst->label);
      if (!nv.ended) {
        c.fail(where(*inst) + ": node " + std::to_string(v) + " never terminated", inst->label);
        continue;
      }
      const double e = nv.ended->in_d();
      first_end = first_end ? std::min(*first_end, e) : e;
      last_end = last_end ? std::max(*last_end, e) : e;
      const double len = e - t;
      min_len = std::min(min_len, len);
      max_len = std::max(max_len, len);
      if (len < r_pk || len > 12.0 * r_pk)
        c.fail(where(*inst) + ": node " + std::to_string(v) + " terminated " + fmt(len) + "d after initiation", inst->label);
    }
    int correct_count = 0;
    for (NodeId v = 0; v < n; ++v) correct_count += correct(run.resolved, v) ? 1 : 0;
    if (present != correct_count)
      c.fail(where(*inst) + ": only " + std::to_string(present) + " of " + std::to_string(correct_count) +
             " correct nodes joined", inst->label);
    if (first_end && last_end) {
      k5 = std::max(k5, *last_end - *first_end);
      if (*last_end - *first_end > ceil.k5) c.fail(where(*inst) + ": termination spread " + fmt(*last_end - *first_end) + "d", inst->label);
    }
  }
  double k4 = 0;
  for (const auto* inst : scope(run, idx)) {
    if (!inst->any_nonzero_input()) continue;
    const auto first = inst->first_join();
    for (const auto& [v, nv] : inst->nodes) k4 = std::max(k4, (nv.joined - *first).in_d());
  }
  c.measured["K2"] = k2;
  c.measured["K4"] = k4;
  c.measured["K5"] = k5;
  if (c.examined > 0) {
    c.measured["min_participation_lag"] = min_join;
    c.measured["min_duration"] = min_len;
    c.measured["max_duration"] = max_len;
  }
  return c;
}

Check check_silence(const RunResult& run, const TraceIndex& idx) {
  Check c{"silence", "all-zero instances send no payload bits"};
  for (const auto* inst : scope(run, idx)) {
    if (inst->nodes.empty() || inst->any_nonzero_input()) continue;
    ++c.examined;
    for (const auto& [v, nv] : inst->nodes)
      for (std::size_t rd = 1; rd < nv.sent.size(); ++rd)
        for (std::size_t w = 0; w < nv.sent[rd].size(); ++w)
          if (nv.sent[rd][w] && *nv.sent[rd][w] && (*nv.sent[rd][w])->size() > 0)
            c.fail(where(*inst) + ": node " + std::to_string(v) + " sent payload bits in round " + std::to_string(rd), inst->label);
  }
  return c;
}

namespace {

struct ProbeSample {
  RealTime time;
  NodeId v;
  NodeId w;
  bool present;
  Stamp estimate;
  std::int64_t actual;
};

std::vector<ProbeSample> probes(const RunResult& run) {
  std::vector<ProbeSample> out;
  for (const auto& ev : run.trace)
    if (ev.kind == TraceKind::kProbe)
      out.push_back({ev.time, ev.node, ev.peer, ev.value != 0, Stamp{ev.a}, ev.b});
  return out;
}

// Signed error H_w - estimate, outside [-q, 3 theta d' + q] is a violation.
bool accurate(const Constants& c, const ProbeSample& p, std::int64_t* lag) {
  if (!p.present) return false;
  const std::int64_t diff = mod_diff(wrap(p.actual, c.modulus), p.estimate, c.modulus);
  if (lag) *lag = diff;
  const std::int64_t hi = c.times_theta(c.d_clock).units * 3 + c.quantum.units;
  return diff >= -c.quantum.units && diff <= hi;
}

}  // namespace

std::optional<double> clock_settle_time(const RunResult& run) {
  const Constants& c = run.resolved.constants;
  std::optional<double> last_bad;
  std::optional<double> first;
  for (const auto& p : probes(run)) {
    if (!correct(run.resolved, p.w)) continue;
    if (!first) first = p.time.in_d();
    if (!accurate(c, p, nullptr)) last_bad = p.time.in_d();
  }
  if (!first) return std::nullopt;
  return last_bad ? *last_bad + run.scenario.probe_period : *first;
}

Check check_clock_accuracy(const RunResult& run) {
  Check c{"clock", "clock estimates of correct nodes are accurate after t0"};
  const Constants& k = run.resolved.constants;
  const double limit = 3.0 * (k.regain_hold.in_d() + 1.0);
  const auto t0 = clock_settle_time(run);
  if (!t0) {
    c.fail("no probe samples");
    return c;
  }
  c.measured["t0"] = *t0;
  c.measured["t0_limit"] = limit;
  std::int64_t worst_lo = 0, worst_hi = 0;
  for (const auto& p : probes(run)) {
    if (!correct(run.resolved, p.w) || p.time.in_d() < *t0) continue;
    ++c.examined;
    std::int64_t lag = 0;
    accurate(k, p, &lag);
    worst_lo = std::min(worst_lo, lag);
    worst_hi = std::max(worst_hi, lag);
  }
  c.measured["max_staleness_d"] = static_cast<double>(worst_hi) / d_local(k);
  c.measured["max_lead_d"] = static_cast<double>(-worst_lo) / d_local(k);
  const RealTime last_bad = RealTime::from_d(*t0 - run.scenario.probe_period);
  if (*t0 > limit) c.fail("estimates settle at " + fmt(*t0) + "d, after " + fmt(limit) + "d", last_bad);
  if (*t0 >= run.scenario.duration) c.fail("estimates never settle within the run", last_bad);
  return c;
}

namespace {

double bits_unit(const Constants& c, double T, bool with_instances) {
  const double n = c.params.n;
  const double base = n * n * std::max(1.0, std::log2(n));
  if (!with_instances) return base;
  return base + n * static_cast<double>(c.params.payload_bits) * c.params.rounds / T;
}

}  // namespace

Check check_bits(const RunResult& run, const Ceilings& ceil) {
  const bool instances = run.scenario.initiations.enabled || !run.scenario.script.empty();
  Check c{instances ? "bits" : "bits-infra", "amortized bits per node per time unit"};
  const Constants& k = run.resolved.constants;
  const double width = 10.0 * run.scenario.T;
  const double from = run.stabilization;
  const double to = from + width;
  if (to > run.scenario.duration) {
    c.fail("run ends at " + fmt(run.scenario.duration) + "d, before the window closes at " + fmt(to) + "d");
    return c;
  }
  std::vector<std::int64_t> bits(static_cast<std::size_t>(k.params.n), 0);
  for (const auto& ev : run.trace)
    if (ev.kind == TraceKind::kSend && correct(run.resolved, ev.node) && ev.time.in_d() >= from && ev.time.in_d() < to)
      bits[ev.node] += ev.bits;
  const double unit = bits_unit(k, run.scenario.T, instances);
  double worst = 0;
  for (NodeId v = 0; v < k.params.n; ++v) {
    if (!correct(run.resolved, v)) continue;
    ++c.examined;
    const double per_time = static_cast<double>(bits[v]) / width;
    worst = std::max(worst, per_time / unit);
  }
  c.measured["c_bits"] = worst;
  c.measured["unit_bits_per_d"] = unit;
  if (worst > ceil.c_bits) c.fail("constant " + fmt(worst) + " exceeds " + fmt(ceil.c_bits));
  return c;
}

Check check_envelope(const RunResult& run, const Ceilings& ceil) {
  Check c{"envelope", "estimates of faulty clocks stay within the progress envelope"};
  const Constants& k = run.resolved.constants;
  const auto t0 = clock_settle_time(run);
  if (!t0) {
    c.fail("no probe samples");
    return c;
  }
  const double theta = k.params.theta_milli / 1000.0;
  const double max_lag = k.regain_hold.in_d() / theta - (2 * theta + 1) * k.d_clock.in_d();
  const double period = run.scenario.probe_period;

  // samples[u][v] ordered by time
  const int n = k.params.n;
  std::vector<std::vector<std::vector<ProbeSample>>> samples(
      static_cast<std::size_t>(n), std::vector<std::vector<ProbeSample>>(static_cast<std::size_t>(n)));
  for (const auto& p : probes(run))
    if (!correct(run.resolved, p.w) && p.present && p.time.in_d() >= *t0) samples[p.w][p.v].push_back(p);

  std::vector<int> lags{0, 1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256};
  const double dl = d_local(k);
  double k1 = 0;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = 0; v < n; ++v)
      for (NodeId w = 0; w < n; ++w) {
        const auto& sv = samples[u][v];
        const auto& sw = samples[u][w];
        if (sv.empty() || sw.empty()) continue;
        std::map<std::int64_t, const ProbeSample*> by_time;
        for (const auto& p : sw) by_time[p.time.ticks] = &p;
        for (const auto& pv : sv)
          for (int lag : lags) {
            const double dt = lag * period;
            if (dt > max_lag) break;
            auto it = by_time.find((pv.time + RealTime::from_d(dt)).ticks);
            if (it == by_time.end()) continue;
            ++c.examined;
            const double diff = static_cast<double>(mod_diff(it->second->estimate, pv.estimate, k.modulus)) / dl;
            const double lo = 2 * dt / (2 * theta + 3);
            const double hi = 2 * theta * dt;
            const double need = std::max({0.0, lo - diff, diff - hi});
            if (need > k1) k1 = need;
            if (need > ceil.k1)
              c.fail("faulty clock " + std::to_string(u) + " seen by " + std::to_string(v) + " at " +
                     fmt(pv.time.in_d()) + "d and by " + std::to_string(w) + " " + fmt(dt) + "d later: difference " +
                     fmt(diff) + "d", pv.time);
          }
      }
  c.measured["K1"] = k1;
  c.measured["max_lag"] = max_lag;
  return c;
}

double measured_stabilization(const RunResult& run, const TraceIndex& idx) {
  const auto protocol = make_protocol(run.scenario);
  double s = 0;
  for (const auto& inst : idx.instances) {
    const auto end = inst.last_end();
    if (!end) continue;
    bool ok = true;
    if (inst.any_nonzero_input()) ok = oracle_mismatches(run, inst, *protocol).empty();
    std::optional<int> agreed;
    for (const auto& [v, nv] : inst.nodes)
      if (nv.ended) {
        if (agreed && *agreed != nv.output) ok = false;
        agreed = nv.output;
      }
    if (!ok) s = std::max(s, end->in_d());
  }
  return s;
}

std::vector<std::string> trace_slice(const sim::Trace& trace, const InstanceLabel& label, std::size_t limit) {
  std::vector<std::string> out;
  for (const auto& ev : trace) {
    if (out.size() >= limit) break;
    const bool labelled = ev.kind == TraceKind::kInitiate || ev.kind == TraceKind::kJoin ||
                          ev.kind == TraceKind::kCross || ev.kind == TraceKind::kStore ||
                          ev.kind == TraceKind::kOutput || ev.kind == TraceKind::kDrop ||
                          ev.kind == TraceKind::kMark || (ev.kind == TraceKind::kSend && ev.msg == MsgKind::kEcho);
    if (labelled && ev.label == label) out.push_back(sim::format_event(ev));
  }
  return out;
}

std::vector<std::string> trace_slice(const sim::Trace& trace, RealTime at, double radius, std::size_t limit) {
  std::vector<std::string> out;
  const RealTime lo = at - RealTime::from_d(radius);
  const RealTime hi = at + RealTime::from_d(radius);
  for (const auto& ev : trace) {
    if (out.size() >= limit || ev.time > hi) break;
    if (ev.time < lo) continue;
    if (ev.kind == TraceKind::kProbe || ev.kind == TraceKind::kClock || ev.kind == TraceKind::kMark ||
        ev.kind == TraceKind::kQuarantine || ev.kind == TraceKind::kWipe)
      out.push_back(sim::format_event(ev));
  }
  return out;
}

Verdict evaluate(const RunResult& run, const Ceilings& ceil) {
  const auto idx = index_trace(run.trace, run.resolved);
  Verdict v;
  v.stabilization_bound = run.stabilization;
  v.measured_stabilization = measured_stabilization(run, idx);
  v.checks.push_back(check_oracle_equivalence(run, idx));
  v.checks.push_back(check_agreement(run, idx));
  v.checks.push_back(check_timing(run, idx, ceil));
  v.checks.push_back(check_silence(run, idx));
  v.checks.push_back(check_clock_accuracy(run));
  v.checks.push_back(check_bits(run, ceil));
  if (run.resolved.strategy == byz::Strategy::kClockLiar) v.checks.push_back(check_envelope(run, ceil));
  for (auto& c : v.checks) {
    if (c.focus_label) c.slice = trace_slice(run.trace, *c.focus_label);
    if (c.focus_time) c.slice = trace_slice(run.trace, *c.focus_time, run.scenario.probe_period);
  }
  return v;
}

std::vector<MetricsRow> metrics(const RunResult& run, double window) {
  const int n = run.resolved.constants.params.n;
  const int windows = std::max(1, static_cast<int>(std::ceil(run.scenario.duration / window)));
  std::vector<MetricsRow> rows;
  for (int i = 0; i < windows; ++i)
    for (NodeId v = 0; v < n; ++v) rows.push_back({v, i * window, 0, 0, 0, 0});
  auto row = [&](const TraceEvent& ev) -> MetricsRow& {
    const int i = std::min(windows - 1, static_cast<int>(ev.time.in_d() / window));
    return rows[static_cast<std::size_t>(i * n + ev.node)];
  };
  for (const auto& ev : run.trace) {
    if (ev.node < 0 || ev.node >= n) continue;
    switch (ev.kind) {
      case TraceKind::kSend:
        (ev.msg == MsgKind::kRound ? row(ev).instance_bits : row(ev).infra_bits) += ev.bits;
        break;
      case TraceKind::kJoin:
        ++row(ev).instances_joined;
        break;
      case TraceKind::kQuarantine:
        ++row(ev).quarantines;
        break;
      default:
        break;
    }
  }
  return rows;
}

std::string format_metrics(const std::vector<MetricsRow>& rows) {
  std::ostringstream os;
  os << "node | window | infra_bits | instance_bits | instances_joined | quarantines\n";
  for (const auto& r : rows)
    os << r.node << " | " << r.window_start << " | " << r.infra_bits << " | " << r.instance_bits << " | "
       << r.instances_joined << " | " << r.quarantines << '\n';
  return os.str();
}

}  // namespace nic::harness
