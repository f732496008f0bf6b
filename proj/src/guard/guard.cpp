#include "nic/guard/guard.hpp"

#include <limits>

namespace nic::guard {

OverloadCount count_instances(const Constants& c, const std::map<InstanceLabel, rounds::RoundState>& states,
                              NodeId initiator, LocalTime now) {
  OverloadCount out;
  const InstanceLabel lo{initiator, Stamp{std::numeric_limits<std::int64_t>::min()}};
  for (auto it = states.lower_bound(lo); it != states.end() && it->first.initiator == initiator; ++it) {
    const auto& st = it->second;
    if (!st.terminated && st.nontrivial()) ++out.active_nontrivial;
    if (st.joined_at <= now && now - st.joined_at < c.window) ++out.active_total;
  }
  return out;
}

Verdict detect_overload(const Constants& c, const std::map<InstanceLabel, rounds::RoundState>& states,
                        NodeId initiator, LocalTime now) {
  const OverloadCount k = count_instances(c, states, initiator, now);
  return (k.active_nontrivial > c.k1 || k.active_total > c.k2) ? Verdict::kInconsistent : Verdict::kOk;
}

}  // namespace nic::guard
