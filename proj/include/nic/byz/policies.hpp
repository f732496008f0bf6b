#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nic/sim/kernel.hpp"

namespace nic::byz {

enum class DelayKind { kUniform, kFastSlow, kSkew, kBoundary };
enum class RateKind { kConstant, kExtreme, kDrifting };

const char* delay_kind_name(DelayKind k);
const char* rate_kind_name(RateKind k);
std::optional<DelayKind> parse_delay_kind(const std::string& s);
std::optional<RateKind> parse_rate_kind(const std::string& s);

/// Delay policies. All stay within [d/64, d - d/64].
///   uniform:   independent uniform draws
///   fast-slow: a fixed half of the receivers always gets the minimum delay,
///              the other half the maximum
///   skew:      each sender has its own delay band
///   boundary:  each envelope gets either the minimum or the maximum
sim::DelayPolicy make_delay_policy(DelayKind kind, int n, std::uint64_t seed);

/// Hardware clocks with rates in [1, theta] and arbitrary offsets in
/// [0, max_offset). Drifting clocks change rate every few d until `horizon`.
std::vector<sim::HardwareClock> make_clocks(RateKind kind, int n, int theta_milli, LocalTime max_offset,
                                            RealTime horizon, sim::Rng& rng);

}  // namespace nic::byz
