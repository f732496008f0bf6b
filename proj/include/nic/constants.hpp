#pragma once

#include <cstdint>
#include <optional>

#include "nic/units.hpp"

namespace nic {

enum class ClockAlgorithm { kSelfStabilizing, kSimple };

/// Inputs from which every protocol constant is derived.
struct SystemParams {
  int n{4};
  int f{1};
  int theta_milli{1100};
  int clock_period{1};          // d' in multiples of d (reduced-frequency mode when > 1)
  LocalTime rate_limit{};       // T, minimum local time between own initiations
  int rounds{8};                // rounds of the silent protocol actually simulated
  std::int64_t payload_bits{0}; // per-node bit bound of the silent protocol
  std::optional<LocalTime> regain_hold_override{};
  ClockAlgorithm clock_algorithm{ClockAlgorithm::kSelfStabilizing};
};

/// Every constant used by the node state machines, in one place.
///
/// The underlying analysis only fixes these asymptotically; the concrete
/// multipliers here are the ones validated by the acceptance suite.
struct Constants {
  SystemParams params;

  LocalTime d;               // one delay bound at rate 1
  LocalTime d_clock;         // d' (== d unless reduced-frequency mode)
  LocalTime theta_d;
  LocalTime quantum;         // clock value granularity, theta*d/4
  LocalTime tick_period;     // 2*theta*d'
  LocalTime too_slow;        // (2 theta^2 + theta) d'
  LocalTime too_fast;        // d'
  LocalTime support_tol;     // (2 theta^2 + 4 theta) d'
  LocalTime init_tol;        // 3 theta d' + one quantum
  LocalTime echo_tol;        // Delta = 8 theta d'
  LocalTime echo_wait;       // E timeout, 2 theta d
  LocalTime round_gap;       // 2 theta d added after an n-f quorum
  LocalTime start_delay;     // C = 22 theta d'
  LocalTime tau_round;       // (2 theta + 4) d
  LocalTime stall;           // theta * tau_round
  LocalTime join_slack;      // 4 theta d, extra stall budget before round 2 for the join spread
  LocalTime tau_inst;        // C + (R+1) tau_round + join_slack
  LocalTime tau_echo;        // (2 theta + 3) Delta + 2 theta d + 4 d
  LocalTime echo_ttl;        // theta * tau_echo
  LocalTime instance_ttl;    // theta * tau_inst * (R+2)
  LocalTime regain_hold;     // D_B = theta * instance_ttl + 2 theta d'
  std::int64_t modulus;      // clock modulus, a multiple of tick_period
  LocalTime rate_limit;      // T
  LocalTime init_ignore;     // T/theta - d
  LocalTime window;          // T~ = (T/theta - d)/theta
  int k1;
  int k2;
  LocalTime quarantine;      // theta d
  int stamp_bits;
  int id_bits;
  int round_bits;
  int header_bits;           // round-message framing without payload
  int c_hdr;

  static constexpr int kRunFactor = 4;  // c_run in the overload thresholds

  /// Scales a local duration by theta, rounding up.
  LocalTime times_theta(LocalTime x) const;
  /// Divides a local duration by theta, rounding down.
  LocalTime over_theta(LocalTime x) const;

  /// Per-instance bit budget after r simulated rounds.
  std::int64_t instance_budget(int r) const;

  Stamp quantize(LocalTime clock) const;
};

Constants derive_constants(const SystemParams& params);

}  // namespace nic
