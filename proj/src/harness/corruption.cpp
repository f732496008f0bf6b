#include "nic/harness/run.hpp"

namespace nic::harness {

namespace {

class Corruptor {
 public:
  Corruptor(sim::Kernel& k, const Resolved& r, const silent::Protocol& p, std::uint64_t seed)
      : k_(k), r_(r), c_(r.constants), p_(p), rng_(seed) {}

  void run() {
    for (NodeId v = 0; v < c_.params.n; ++v) {
      auto* node = dynamic_cast<node::CorrectNode*>(&k_.process(v));
      if (!node) continue;
      const LocalTime now = k_.local_clock(v, RealTime{0});
      clock(*node, now);
      initiation(*node, now);
      instances(*node, v, now);
      if (coin(0.3)) node->quarantine().set_until(now + around(c_.quarantine * 3));
    }
    garbage();
  }

 private:
  bool coin(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_); }
  // Signed offset in [-span, span].
  LocalTime around(LocalTime span) { return LocalTime{uniform(-span.units, span.units)}; }

  Stamp any_stamp() { return Stamp{uniform(0, c_.modulus - 1)}; }
  // A stamp near some node's true clock, which is more likely to pass checks.
  Stamp plausible_stamp(NodeId w) {
    const LocalTime h = k_.local_clock(w, RealTime{0}) + around(LocalTime::from_d(20));
    return c_.quantize(h);
  }
  Stamp stamp_for(NodeId w) { return coin(0.5) ? plausible_stamp(w) : any_stamp(); }

  std::optional<LocalTime> maybe_time(LocalTime now, LocalTime span) {
    if (coin(0.2)) return std::nullopt;
    return now + around(span);
  }

  void clock(node::CorrectNode& node, LocalTime now) {
    auto& st = node.clock().state();
    const int n = c_.params.n;
    for (NodeId u = 0; u < n; ++u)
      for (NodeId w = 0; w < n; ++w) st.rows[u][w] = coin(0.3) ? std::nullopt : std::optional<Stamp>(stamp_for(w));
    for (NodeId w = 0; w < n; ++w) {
      st.last_receipt[w] = maybe_time(now, LocalTime::from_d(50));
      st.report_hold[w].set_last_reset(maybe_time(now, c_.tick_period * 3));
      st.trust_hold[w].set_last_reset(maybe_time(now, c_.regain_hold));
    }
  }

  InstanceLabel random_label() {
    const NodeId w = static_cast<NodeId>(uniform(0, c_.params.n - 1));
    return {w, stamp_for(w)};
  }

  void initiation(node::CorrectNode& node, LocalTime now) {
    auto& st = node.initiation().state();
    st.last_initiation = maybe_time(now, c_.rate_limit * 2);
    for (auto& t : st.last_init_from) t = maybe_time(now, c_.rate_limit * 2);
    const int labels = static_cast<int>(uniform(0, 10));
    for (int i = 0; i < labels; ++i) {
      auto& e = st.echoes[random_label()];
      e.wait = Timeout(c_.echo_wait);
      for (NodeId u = 0; u < c_.params.n; ++u)
        if (coin(0.6)) e.stored[u] = now + around(c_.echo_ttl);
      e.pending = coin(0.5);
      e.wait.set_last_reset(maybe_time(now, c_.echo_wait * 2));
    }
  }

  std::optional<Payload> random_payload() {
    switch (uniform(0, 3)) {
      case 0: return std::nullopt;
      case 1: return Payload::single(false);
      case 2: return Payload::single(true);
      default: return Payload{1, 0, 1};
    }
  }

  void instances(node::CorrectNode& node, NodeId self, LocalTime now) {
    auto& runner = node.runner();
    const int R = c_.params.rounds;
    const int n = c_.params.n;
    // Sometimes pile many instances on one initiator to trip overload detection.
    const bool flood = coin(0.3);
    const NodeId victim = static_cast<NodeId>(uniform(0, n - 1));
    const int count = flood ? c_.k2 + 2 : static_cast<int>(uniform(0, 6));
    for (int i = 0; i < count; ++i) {
      InstanceLabel label = random_label();
      if (flood) label = {victim, Stamp{uniform(0, c_.modulus - 1)}};
      rounds::RoundState st = runner.blank_state(label);
      st.input = coin(0.5) ? 1 : 0;
      st.confidence = static_cast<int>(uniform(0, 2));
      st.proto = p_.start(self, st.input);
      const int played = static_cast<int>(uniform(0, R));
      for (int r = 1; r <= played; ++r) {
        st.proto->send(r);
        silent::Inbox in(static_cast<std::size_t>(n));
        for (auto& m : in) m = coin(0.7) ? std::optional<Payload>(Payload::single(true)) : random_payload();
        st.proto->receive(r, in);
      }
      st.next_round = static_cast<int>(uniform(1, R + 1));
      for (int r = 1; r <= R + 1; ++r) st.thresholds[static_cast<std::size_t>(r)] = maybe_time(now, LocalTime::from_d(60));
      for (int r = 1; r <= R; ++r)
        for (NodeId u = 0; u < n; ++u)
          if (coin(0.3)) st.inbox[static_cast<std::size_t>(r)][static_cast<std::size_t>(u)] = {true, random_payload()};
      st.joined_at = now + around(c_.instance_ttl);
      st.last_progress = now + around(c_.stall * 2);
      st.bits_sent = uniform(0, c_.instance_budget(R));
      st.terminated = coin(0.2);
      runner.states()[label] = std::move(st);
    }
  }

  Message random_message(NodeId to) {
    const int n = c_.params.n;
    switch (uniform(0, 3)) {
      case 0: {
        UpdateMsg u;
        u.entries.resize(static_cast<std::size_t>(coin(0.9) ? n : n + 1));
        for (std::size_t w = 0; w < u.entries.size(); ++w)
          if (coin(0.8)) u.entries[w] = stamp_for(static_cast<NodeId>(w % static_cast<std::size_t>(n)));
        return u;
      }
      case 1: return InitMsg{stamp_for(static_cast<NodeId>(uniform(0, n - 1)))};
      case 2: return EchoMsg{random_label()};
      default: {
        InstanceLabel label = random_label();
        auto* node = dynamic_cast<node::CorrectNode*>(&k_.process(to));
        if (node && !node->runner().states().empty() && coin(0.5)) {
          auto it = node->runner().states().begin();
          std::advance(it, static_cast<long>(uniform(0, static_cast<std::int64_t>(node->runner().states().size()) - 1)));
          label = it->first;
        }
        return RoundMsg{label, static_cast<int>(uniform(0, c_.params.rounds + 1)), random_payload()};
      }
    }
  }

  void garbage() {
    const int n = c_.params.n;
    for (NodeId from = 0; from < n; ++from)
      for (NodeId to = 0; to < n; ++to) {
        if (from == to) continue;
        const int count = static_cast<int>(uniform(0, 3));
        for (int i = 0; i < count; ++i)
          k_.inject_garbage(from, to, random_message(to), RealTime{uniform(1, kTicksPerD - 1)});
      }
  }

  sim::Kernel& k_;
  const Resolved& r_;
  const Constants& c_;
  const silent::Protocol& p_;
  sim::Rng rng_;
};

}  // namespace

void corrupt(sim::Kernel& kernel, const Resolved& r, const silent::Protocol& protocol, std::uint64_t seed) {
  Corruptor(kernel, r, protocol, seed).run();
}

}  // namespace nic::harness
