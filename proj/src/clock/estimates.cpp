#include "nic/clock/estimates.hpp"

namespace nic::clock {

ClockEstimates::ClockEstimates(const Constants& c, NodeId self) : c_(c), self_(self), n_(c.params.n) {
  const auto n = static_cast<std::size_t>(n_);
  st_.rows.assign(n, std::vector<std::optional<Stamp>>(n));
  st_.last_receipt.assign(n, std::nullopt);
  st_.report_hold.assign(n, Timeout(c.tick_period));
  st_.trust_hold.assign(n, Timeout(c.regain_hold));
  st_.distrusted.assign(n, false);
  st_.bootstrapped.assign(n, false);
}

void ClockEstimates::bootstrap(const std::vector<Stamp>& initial_clocks) {
  for (NodeId w = 0; w < n_; ++w) {
    for (NodeId u = 0; u < n_; ++u) st_.rows[u][w] = initial_clocks.at(w);
    st_.bootstrapped[w] = true;
    st_.last_receipt[w].reset();
  }
}

void ClockEstimates::distrust(NodeId w, LocalTime now) {
  if (simple()) {
    st_.distrusted[w] = true;
    st_.rows[w][w].reset();
    st_.last_receipt[w].reset();
    return;
  }
  st_.report_hold[w].reset(now);
  st_.trust_hold[w].reset(now);
}

UpdateMsg ClockEstimates::on_tick(LocalTime now) {
  UpdateMsg out;
  out.entries.resize(static_cast<std::size_t>(n_));
  for (NodeId w = 0; w < n_; ++w) {
    if (w == self_) continue;
    if (simple()) {
      if (st_.distrusted[w]) continue;
      if (!st_.bootstrapped[w] && st_.last_receipt[w] && now - *st_.last_receipt[w] > c_.too_slow) distrust(w, now);
      if (!st_.distrusted[w]) out.entries[w] = st_.rows[w][w];
      continue;
    }
    const auto& r = st_.last_receipt[w];
    if (!r || *r > now || now - *r > c_.too_slow) distrust(w, now);
    if (st_.report_hold[w].expired(now)) out.entries[w] = st_.rows[w][w];
  }
  out.entries[self_] = c_.quantize(now);
  st_.rows[self_] = out.entries;
  return out;
}

int ClockEstimates::support(NodeId x) const {
  const auto& claim = st_.rows[x][x];
  if (!claim) return 0;
  int count = 0;
  for (NodeId u = 0; u < n_; ++u) {
    const auto& seen = st_.rows[u][x];
    if (seen && mod_distance(*claim, *seen, c_.modulus) <= c_.support_tol.units) ++count;
  }
  return count;
}

UpdateOutcome ClockEstimates::on_update(NodeId w, const UpdateMsg& msg, LocalTime now) {
  UpdateOutcome out;
  if (static_cast<int>(msg.entries.size()) != n_ || w == self_) {
    out.malformed = true;
    return out;
  }
  const int quorum = n_ - c_.params.f;

  if (simple()) {
    if (st_.distrusted[w]) return out;
    const auto& r = st_.last_receipt[w];
    const bool too_fast = r && now - *r < c_.too_fast;
    const auto& prev = st_.rows[w][w];
    const auto& claim = msg.entries[w];
    bool bad = too_fast || !claim || !prev;
    if (!bad && !(st_.bootstrapped[w] && !r)) bad = mod_diff(*claim, *prev, c_.modulus) != c_.tick_period.units;
    if (!bad && st_.bootstrapped[w] && !r) {
      // First update after the idealized start: the claim must continue the
      // bootstrapped value by whole ticks.
      const auto gap = mod_diff(*claim, *prev, c_.modulus);
      bad = gap <= 0 || gap % c_.tick_period.units != 0;
    }
    if (bad) {
      out.timing_violation = true;
      distrust(w, now);
      return out;
    }
    st_.rows[w] = msg.entries;
    if (support(w) < quorum) {
      ++out.support_resets;
      distrust(w, now);
      return out;
    }
    st_.bootstrapped[w] = false;
    st_.last_receipt[w] = now;
    return out;
  }

  const auto& r = st_.last_receipt[w];
  const auto& prev = st_.rows[w][w];
  const auto& claim = msg.entries[w];
  const bool timing_bad = !r || *r > now || now - *r < c_.too_fast;
  const bool value_bad = !prev || !claim || mod_diff(*claim, *prev, c_.modulus) != c_.tick_period.units;
  // A missing R_last only means no update arrived yet; it is not a violation
  // of the too-fast rule, but the value chain cannot be checked either.
  if ((r && timing_bad) || value_bad) {
    out.timing_violation = true;
    distrust(w, now);
  }
  st_.rows[w] = msg.entries;
  for (NodeId x = 0; x < n_; ++x) {
    if (x == self_) continue;
    if (support(x) < quorum) {
      st_.trust_hold[x].reset(now);
      ++out.support_resets;
    }
  }
  st_.last_receipt[w] = now;
  return out;
}

std::optional<Stamp> ClockEstimates::estimate(NodeId w, LocalTime now) const {
  if (w == self_) return c_.quantize(now);
  if (simple()) {
    if (st_.distrusted[w]) return std::nullopt;
    return st_.rows[w][w];
  }
  if (!st_.trust_hold[w].expired(now)) return std::nullopt;
  return st_.rows[w][w];
}

}  // namespace nic::clock
