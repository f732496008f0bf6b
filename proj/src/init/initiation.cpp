#include "nic/init/initiation.hpp"

namespace nic::init {

Initiation::Initiation(const Constants& c, NodeId self) : c_(c), self_(self) {
  st_.last_init_from.assign(static_cast<std::size_t>(c.params.n), std::nullopt);
}

std::optional<Stamp> Initiation::initiate(LocalTime now) {
  const auto& last = st_.last_initiation;
  if (last && *last <= now && now - *last <= c_.rate_limit) return std::nullopt;
  st_.last_initiation = now;
  return c_.quantize(now);
}

InitVerdict Initiation::on_init(NodeId from, Stamp stamp, std::optional<Stamp> estimate, LocalTime now) {
  auto& prev = st_.last_init_from.at(static_cast<std::size_t>(from));
  const bool limited = prev && *prev <= now && now - *prev < c_.init_ignore;
  prev = now;
  if (limited) return InitVerdict::kRateLimited;
  if (!estimate) return InitVerdict::kNoTrust;
  if (mod_distance(stamp, *estimate, c_.modulus) > c_.init_tol.units) return InitVerdict::kOutOfTolerance;
  return InitVerdict::kEcho;
}

EchoVerdict Initiation::on_echo(NodeId from, const InstanceLabel& label, std::optional<Stamp> estimate,
                                LocalTime now) {
  // Without a trusted estimate there is nothing to compare against. Storing
  // anyway keeps a node that a faulty initiator singled out for distrust in
  // step with the nodes that trust it: arming still takes f+1 echoes, so at
  // least one correct echo bounds when it happens.
  if (estimate && mod_distance(label.stamp, *estimate, c_.modulus) > c_.echo_tol.units)
    return EchoVerdict::kOutOfTolerance;
  auto [it, inserted] = st_.echoes.try_emplace(label);
  EchoEntry& e = it->second;
  if (inserted) e.wait = Timeout(c_.echo_wait);
  if (!e.stored.emplace(from, now).second) return EchoVerdict::kDuplicate;
  if (static_cast<int>(e.stored.size()) >= c_.params.f + 1 && e.wait.expired(now)) {
    e.wait.reset(now);
    e.pending = true;
    return EchoVerdict::kStoredAndArmed;
  }
  return EchoVerdict::kStored;
}

std::vector<Participation> Initiation::take_expired(LocalTime now) {
  std::vector<Participation> out;
  const int n = c_.params.n;
  const int f = c_.params.f;
  for (auto& [label, e] : st_.echoes) {
    if (!e.pending || !e.wait.expired(now)) continue;
    e.pending = false;
    const int count = static_cast<int>(e.stored.size());
    out.push_back({label, count >= n - f ? 2 : (count >= f + 1 ? 1 : 0), count});
  }
  return out;
}

std::optional<LocalTime> Initiation::next_expiry(LocalTime now) const {
  std::optional<LocalTime> best;
  for (const auto& [label, e] : st_.echoes) {
    if (!e.pending) continue;
    const LocalTime at = e.wait.expires_at(now).value_or(now);
    if (!best || at < *best) best = at;
  }
  return best;
}

int Initiation::gc(LocalTime now) {
  int removed = 0;
  for (auto it = st_.echoes.begin(); it != st_.echoes.end();) {
    auto& stored = it->second.stored;
    for (auto s = stored.begin(); s != stored.end();) {
      if (s->second > now || now - s->second > c_.echo_ttl) {
        s = stored.erase(s);
        ++removed;
      } else {
        ++s;
      }
    }
    if (stored.empty() && !it->second.pending)
      it = st_.echoes.erase(it);
    else
      ++it;
  }
  return removed;
}

void Initiation::wipe() { st_.echoes.clear(); }

}  // namespace nic::init
