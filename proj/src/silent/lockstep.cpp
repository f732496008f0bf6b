#include "nic/silent/lockstep.hpp"

#include <set>
#include <string>

namespace nic::silent {

LockstepRun run_lockstep(const Protocol& protocol, const LockstepConfig& cfg) {
  const int n = protocol.n();
  const int rounds = protocol.rounds();
  if (static_cast<int>(cfg.inputs.size()) != n || static_cast<int>(cfg.faulty.size()) != n ||
      static_cast<int>(cfg.participates.size()) != n)
    throw ModelError("lockstep: configuration vectors must have n entries");

  std::vector<std::unique_ptr<ProtocolInstance>> nodes(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v)
    if (!cfg.faulty[v] && cfg.participates[v]) nodes[v] = protocol.start(v, cfg.inputs[v]);

  LockstepRun run;
  run.outputs.assign(static_cast<std::size_t>(n), std::nullopt);
  run.bits.assign(static_cast<std::size_t>(n), 0);
  for (int r = 1; r <= rounds; ++r) {
    std::vector<Outbox> sent(static_cast<std::size_t>(n), Outbox(static_cast<std::size_t>(n)));
    for (NodeId v = 0; v < n; ++v) {
      if (nodes[v]) {
        sent[v] = nodes[v]->send(r);
        sent[v].resize(static_cast<std::size_t>(n));
        run.bits[v] += outbox_bits(sent[v]);
      } else if (cfg.faulty[v] && cfg.byzantine) {
        for (NodeId w = 0; w < n; ++w) sent[v][w] = cfg.byzantine(r, v, w);
      }
    }
    std::vector<Inbox> received(static_cast<std::size_t>(n), Inbox(static_cast<std::size_t>(n)));
    for (NodeId v = 0; v < n; ++v)
      for (NodeId w = 0; w < n; ++w) received[w][v] = sent[v][w];
    for (NodeId v = 0; v < n; ++v)
      if (nodes[v]) nodes[v]->receive(r, received[v]);
    run.sent.push_back(std::move(sent));
    run.received.push_back(std::move(received));
  }
  for (NodeId v = 0; v < n; ++v)
    if (nodes[v]) run.outputs[v] = nodes[v]->output();
  return run;
}

NodeReplay replay_node(const Protocol& protocol, NodeId self, int input, const std::vector<Inbox>& inboxes) {
  if (static_cast<int>(inboxes.size()) != protocol.rounds()) throw ModelError("replay: need one inbox per round");
  NodeReplay out;
  auto inst = protocol.start(self, input);
  for (int r = 1; r <= protocol.rounds(); ++r) {
    out.sent.push_back(inst->send(r));
    inst->receive(r, inboxes[r - 1]);
  }
  out.output = inst->output();
  return out;
}

namespace {

struct Search {
  const Protocol& protocol;
  const std::vector<std::optional<Payload>>& alphabet;
  NodeId faulty;
  std::vector<NodeId> correct;
  std::vector<int> inputs;
  std::vector<std::set<std::string>> seen;  // per round
  BruteForceResult& result;

  std::string key(const std::vector<std::unique_ptr<ProtocolInstance>>& states) const {
    std::string k;
    for (const auto& s : states) k += s->fingerprint() + ";";
    return k;
  }

  void finish(const std::vector<std::unique_ptr<ProtocolInstance>>& states) {
    ++result.terminal_states;
    const int first = states.front()->output();
    bool agree = true;
    for (const auto& s : states) agree = agree && s->output() == first;
    if (!agree) ++result.agreement_violations;
    bool unanimous = true;
    for (int in : inputs) unanimous = unanimous && in == inputs.front();
    if (unanimous)
      for (const auto& s : states)
        if (s->output() != inputs.front()) {
          ++result.validity_violations;
          break;
        }
  }

  void explore(int round, const std::vector<std::unique_ptr<ProtocolInstance>>& states) {
    if (!seen[round].insert(key(states)).second) return;
    ++result.expanded;
    if (round > protocol.rounds()) {
      finish(states);
      return;
    }
    const int n = protocol.n();
    const std::size_t k = correct.size();
    // Correct messages are fixed by the joint state.
    std::vector<std::unique_ptr<ProtocolInstance>> base;
    std::vector<Outbox> outs;
    for (const auto& s : states) {
      base.push_back(s->clone());
      outs.push_back(base.back()->send(round));
      outs.back().resize(static_cast<std::size_t>(n));
    }
    std::vector<std::size_t> choice(k, 0);
    while (true) {
      std::vector<std::unique_ptr<ProtocolInstance>> next;
      for (std::size_t i = 0; i < k; ++i) {
        Inbox inbox(static_cast<std::size_t>(n));
        for (std::size_t j = 0; j < k; ++j) inbox[correct[j]] = outs[j][correct[i]];
        inbox[faulty] = alphabet[choice[i]];
        next.push_back(base[i]->clone());
        next.back()->receive(round, inbox);
      }
      explore(round + 1, next);
      std::size_t pos = 0;
      while (pos < k && ++choice[pos] == alphabet.size()) choice[pos++] = 0;
      if (pos == k) break;
    }
  }
};

}  // namespace

BruteForceResult brute_force(const Protocol& protocol, const std::vector<std::optional<Payload>>& alphabet) {
  BruteForceResult result;
  const int n = protocol.n();
  if (protocol.f() < 1) throw ModelError("brute force needs a faulty node");
  for (NodeId faulty = 0; faulty < n; ++faulty) {
    std::vector<NodeId> correct;
    for (NodeId v = 0; v < n; ++v)
      if (v != faulty) correct.push_back(v);
    const std::size_t k = correct.size();
    for (std::uint32_t mask = 0; mask < (1U << k); ++mask) {
      Search s{protocol, alphabet, faulty, correct, {}, {}, result};
      s.seen.resize(static_cast<std::size_t>(protocol.rounds()) + 2);
      std::vector<std::unique_ptr<ProtocolInstance>> states;
      for (std::size_t i = 0; i < k; ++i) {
        s.inputs.push_back(static_cast<int>((mask >> i) & 1U));
        states.push_back(protocol.start(correct[i], s.inputs.back()));
      }
      s.explore(1, states);
    }
  }
  return result;
}

}  // namespace nic::silent
