#include <random>

#include "doctest.h"
#include "nic/silent/lockstep.hpp"
#include "nic/silent/phase_king.hpp"
#include "nic/silent/silent.hpp"

using namespace nic;
using namespace nic::silent;

namespace {

std::shared_ptr<const Protocol> king(int n, int f) { return std::make_shared<PhaseKing>(n, f); }

LockstepConfig clean(std::vector<int> inputs) {
  LockstepConfig cfg;
  const auto n = inputs.size();
  cfg.inputs = std::move(inputs);
  cfg.faulty.assign(n, false);
  cfg.participates.assign(n, true);
  return cfg;
}

std::int64_t total_bits(const LockstepRun& run) {
  std::int64_t t = 0;
  for (auto b : run.bits) t += b;
  return t;
}

}  // namespace

TEST_CASE("phase king parameters") {
  PhaseKing pk(7, 2);
  CHECK(pk.rounds() == 9);
  CHECK(pk.bit_bound() == 63);
  CHECK_THROWS_AS(PhaseKing(6, 2), ModelError);
  SilentProtocol s(king(7, 2));
  CHECK(s.rounds() == 11);
  CHECK(s.bit_bound() == 63 + 14);
}

TEST_CASE("phase king is valid on clean runs") {
  for (int b = 0; b < 2; ++b) {
    auto run = run_lockstep(PhaseKing(4, 1), clean({b, b, b, b}));
    for (auto o : run.outputs) CHECK(o == b);
  }
}

TEST_CASE("phase king survives faulty kings in the first phases") {
  // Nodes 0 and 1 are faulty and king phases 1 and 2; they tell half the
  // nodes 0 and the other half 1 in every round.
  LockstepConfig cfg = clean({0, 0, 1, 0, 1, 1, 0});
  cfg.faulty[0] = cfg.faulty[1] = true;
  cfg.byzantine = [](int, NodeId, NodeId to) { return std::optional<Payload>(Payload::single(to % 2 == 0)); };
  auto run = run_lockstep(PhaseKing(7, 2), cfg);
  std::optional<int> agreed;
  for (NodeId v = 2; v < 7; ++v) {
    REQUIRE(run.outputs[v].has_value());
    if (!agreed) agreed = run.outputs[v];
    CHECK(run.outputs[v] == agreed);
  }
}

TEST_CASE("exhaustive faulty-message search finds no violation at n=4") {
  const std::vector<std::optional<Payload>> alphabet{std::nullopt, Payload::single(false), Payload::single(true)};
  const auto r = brute_force(PhaseKing(4, 1), alphabet);
  CHECK(r.agreement_violations == 0);
  CHECK(r.validity_violations == 0);
  CHECK(r.terminal_states > 0);

  const auto rs = brute_force(SilentProtocol(king(4, 1)), alphabet);
  CHECK(rs.agreement_violations == 0);
  CHECK(rs.validity_violations == 0);
}

TEST_CASE("all-zero inputs keep the wrapped protocol silent") {
  SilentProtocol s(king(4, 1));
  auto run = run_lockstep(s, clean({0, 0, 0, 0}));
  CHECK(total_bits(run) == 0);
  for (auto o : run.outputs) CHECK(o == 0);

  // Same with a faulty node shouting ones.
  LockstepConfig cfg = clean({0, 0, 0, 0});
  cfg.faulty[3] = true;
  cfg.byzantine = [](int, NodeId, NodeId) { return std::optional<Payload>(Payload::single(true)); };
  auto run2 = run_lockstep(s, cfg);
  for (NodeId v = 0; v < 3; ++v) {
    CHECK(run2.bits[v] == 0);
    CHECK(run2.outputs[v] == 0);
  }
}

TEST_CASE("unanimous ones with a silent faulty node give output 1") {
  SilentProtocol s(king(4, 1));
  LockstepConfig cfg = clean({1, 1, 1, 0});
  cfg.faulty[3] = true;
  auto run = run_lockstep(s, cfg);
  for (NodeId v = 0; v < 3; ++v) CHECK(run.outputs[v] == 1);
}

TEST_CASE("a split majority is demoted to zero") {
  SilentProtocol s(king(7, 2));
  auto run = run_lockstep(s, clean({1, 1, 1, 1, 0, 0, 0}));
  // Each node sees exactly four ones in round 1, fewer than n-f = 5, so no
  // node broadcasts in round 2.
  for (NodeId v = 0; v < 7; ++v) {
    int ones_round1 = 0;
    int ones_round2 = 0;
    for (NodeId u = 0; u < 7; ++u) {
      ones_round1 += run.received[0][v][u].has_value();
      ones_round2 += run.received[1][v][u].has_value();
    }
    CHECK(ones_round1 == 4);
    CHECK(ones_round2 == 0);
    CHECK(run.outputs[v] == 0);
  }
}

TEST_CASE("non-joining correct nodes force output 0 when participants hold zeros") {
  SilentProtocol s(king(4, 1));
  LockstepConfig cfg = clean({0, 0, 0, 0});
  cfg.participates[2] = false;
  cfg.faulty[3] = true;
  cfg.byzantine = [](int, NodeId, NodeId) { return std::optional<Payload>(Payload::single(true)); };
  auto run = run_lockstep(s, cfg);
  CHECK(run.outputs[0] == 0);
  CHECK(run.outputs[1] == 0);
}

TEST_CASE("wrapped protocol keeps agreement and validity under random faults") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = trial % 2 ? 7 : 4;
    const int f = (n - 1) / 3;
    SilentProtocol s(king(n, f));
    std::vector<int> inputs(static_cast<std::size_t>(n));
    const int cls = trial % 3;
    for (auto& in : inputs) in = cls == 2 ? static_cast<int>(rng() % 2) : cls;
    LockstepConfig cfg = clean(inputs);
    for (int i = 0; i < f; ++i) cfg.faulty[static_cast<std::size_t>(rng() % n)] = true;
    const std::uint64_t salt = rng();
    cfg.byzantine = [salt](int r, NodeId from, NodeId to) -> std::optional<Payload> {
      const std::uint64_t h = (salt ^ (static_cast<std::uint64_t>(r) * 1000003U + from * 1009U + to)) * 0x9E3779B97F4A7C15ULL;
      switch ((h >> 33) % 3) {
        case 0: return std::nullopt;
        case 1: return Payload::single(false);
        default: return Payload::single(true);
      }
    };
    auto run = run_lockstep(s, cfg);
    std::optional<int> agreed;
    bool unanimous = true;
    std::optional<int> first_input;
    for (NodeId v = 0; v < n; ++v) {
      if (cfg.faulty[v]) continue;
      if (!agreed) agreed = run.outputs[v];
      CHECK(run.outputs[v] == agreed);
      if (!first_input) first_input = inputs[v];
      unanimous = unanimous && inputs[v] == *first_input;
      // Wrapper overhead is at most two broadcasts.
      CHECK(run.bits[v] <= s.bit_bound());
    }
    if (unanimous) CHECK(agreed == first_input);
  }
}

TEST_CASE("replaying one node reproduces its lockstep behaviour") {
  SilentProtocol s(king(4, 1));
  auto run = run_lockstep(s, clean({1, 1, 1, 1}));
  std::vector<Inbox> inboxes;
  for (const auto& r : run.received) inboxes.push_back(r[2]);
  auto replay = replay_node(s, 2, 1, inboxes);
  CHECK(replay.output == run.outputs[2]);
  for (std::size_t r = 0; r < replay.sent.size(); ++r) CHECK(replay.sent[r] == run.sent[r][2]);
}
