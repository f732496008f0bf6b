#include "nic/constants.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace nic {

std::string to_string(const InstanceLabel& label) {
  std::ostringstream os;
  os << label.initiator << '@' << label.stamp.value;
  return os.str();
}

int parse_theta_milli(const std::string& text) {
  // Decimal with at most three fractional digits, parsed without floats.
  std::int64_t whole = 0;
  std::int64_t frac = 0;
  int frac_digits = 0;
  bool seen_dot = false;
  bool any = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_dot) throw ModelError("theta: malformed number '" + text + "'");
      seen_dot = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) throw ModelError("theta: malformed number '" + text + "'");
    any = true;
    if (seen_dot) {
      if (++frac_digits > 3) throw ModelError("theta: at most three decimals supported");
      frac = frac * 10 + (c - '0');
    } else {
      whole = whole * 10 + (c - '0');
    }
  }
  if (!any) throw ModelError("theta: empty value");
  while (frac_digits < 3) {
    frac *= 10;
    ++frac_digits;
  }
  const std::int64_t milli = whole * 1000 + frac;
  if (milli < 1000 || milli > 10000) throw ModelError("theta must lie in [1, 10]");
  return static_cast<int>(milli);
}

LocalTime Constants::times_theta(LocalTime x) const {
  return {ceil_div(x.units * params.theta_milli, kRateScale)};
}

LocalTime Constants::over_theta(LocalTime x) const {
  return {x.units * kRateScale / params.theta_milli};
}

std::int64_t Constants::instance_budget(int r) const {
  return params.payload_bits +
         static_cast<std::int64_t>(c_hdr) * r * params.n * std::max(1, ceil_log2(params.n));
}

Stamp Constants::quantize(LocalTime clock) const {
  std::int64_t v = clock.units;
  std::int64_t q = quantum.units;
  std::int64_t floored = (v >= 0 ? v / q : -ceil_div(-v, q)) * q;
  return wrap(floored, modulus);
}

Constants derive_constants(const SystemParams& p) {
  if (p.n < 1) throw ModelError("n must be positive");
  if (p.f < 0 || 3 * p.f >= p.n) throw ModelError("resilience requires f < n/3");
  if (p.theta_milli < 1000) throw ModelError("theta must be at least 1");
  if (p.clock_period < 1) throw ModelError("clock_update_period must be a positive integer");
  if (p.rounds < 1) throw ModelError("protocol must have at least one round");

  const std::int64_t k = p.theta_milli;  // theta in thousandths
  const std::int64_t per = p.clock_period;
  Constants c;
  c.params = p;
  c.d = {kLocalPerD};
  c.d_clock = {kLocalPerD * per};
  c.theta_d = {kTicksPerD * k};
  c.quantum = {2000 * k};
  c.tick_period = {16000 * k * per};
  c.too_slow = {per * (16 * k * k + 8000 * k)};
  c.too_fast = c.d_clock;
  c.support_tol = {per * (16 * k * k + 32000 * k)};
  c.init_tol = LocalTime{24000 * k * per} + c.quantum;
  c.echo_tol = {64000 * k * per};
  c.echo_wait = {16000 * k};
  c.round_gap = {16000 * k};
  c.start_delay = {176000 * k * per};
  c.tau_round = {16000 * k + 4 * kLocalPerD};
  c.stall = c.times_theta(c.tau_round);
  c.join_slack = {32000 * k};
  c.tau_inst = c.start_delay + c.tau_round * (p.rounds + 1) + c.join_slack;
  c.tau_echo = LocalTime{(2 * k + 3000) * 64 * k * per} + LocalTime{16000 * k} + LocalTime{4 * kLocalPerD};
  c.echo_ttl = c.times_theta(c.tau_echo);
  c.instance_ttl = c.times_theta(c.tau_inst * (p.rounds + 2));
  c.regain_hold = p.regain_hold_override.value_or(c.times_theta(c.instance_ttl) + c.tick_period);
  if (c.regain_hold <= c.instance_ttl && !p.regain_hold_override)
    throw ModelError("internal: regain hold must exceed the instance lifetime");

  const std::int64_t raw_mod =
      64 * (c.start_delay.units + 16000 * k * (p.rounds + 3) + c.regain_hold.units);
  c.modulus = ceil_div(raw_mod, c.tick_period.units) * c.tick_period.units;

  c.rate_limit = p.rate_limit;
  const LocalTime min_t{16 * k * k};  // 2 theta^2 d
  if (p.rate_limit < min_t) throw ModelError("T must be at least 2*theta^2*d");
  c.init_ignore = c.over_theta(p.rate_limit) - c.d;
  c.window = c.over_theta(c.init_ignore);
  const std::int64_t w = std::max<std::int64_t>(1, c.window.units);
  c.k1 = static_cast<int>(ceil_div(Constants::kRunFactor * p.rounds * kLocalPerD, w)) + 1;
  c.k2 = static_cast<int>(ceil_div(static_cast<std::int64_t>(p.n - p.f) * kLocalPerD * Constants::kRunFactor * p.rounds, w)) + p.n;
  c.quarantine = c.theta_d;

  c.stamp_bits = ceil_log2(c.modulus / c.quantum.units);
  c.id_bits = std::max(1, ceil_log2(p.n));
  c.round_bits = std::max(1, ceil_log2(p.rounds + 1));
  c.header_bits = 3 + c.id_bits + c.stamp_bits + c.round_bits + 1;
  c.c_hdr = static_cast<int>(ceil_div(c.header_bits, std::max(1, ceil_log2(p.n))));
  return c;
}

}  // namespace nic
