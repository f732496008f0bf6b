#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nic/byz/policies.hpp"
#include "nic/node/node.hpp"

namespace nic::byz {

enum class Strategy { kCrash, kEquivocate, kSplitEcho, kClockLiar, kSpam };

const char* strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(const std::string& s);
std::vector<Strategy> all_strategies();

/// Network and clock conditions each named adversary runs under.
struct Conditions {
  DelayKind delay;
  RateKind rate;
};
Conditions conditions_for(Strategy s);

struct ByzantineSetup {
  Constants constants;
  NodeId self{0};
  std::shared_ptr<const silent::Protocol> protocol;
  node::InputOracle oracle;
  std::uint64_t seed{0};
};

/// Update-timing patterns used by the clock-liar adversary.
enum class LiarPace { kFastest, kSlowest, kAlternating };

/// Creates the faulty process for a named strategy.
///
///   crash       never sends anything
///   equivocate  runs the protocol but flips round payloads for half the
///               receivers and sends its inits to only half of the nodes
///   split-echo  sends inits and echoes to label-dependent subsets
///   clock-liar  feeds every receiver its own update stream, each paced at
///               the fastest or slowest rate the timing checks accept
///   spam        floods forged inits, echoes, round frames and malformed
///               updates on top of an otherwise correct run
std::unique_ptr<sim::Process> make_byzantine(Strategy s, const ByzantineSetup& setup);

}  // namespace nic::byz
