#include "nic/byz/policies.hpp"

namespace nic::byz {

namespace {
constexpr std::int64_t kEps = kTicksPerD / 64;
constexpr std::int64_t kMin = kEps;
constexpr std::int64_t kMax = kTicksPerD - kEps;
}  // namespace

const char* delay_kind_name(DelayKind k) {
  switch (k) {
    case DelayKind::kUniform: return "uniform";
    case DelayKind::kFastSlow: return "fast-slow";
    case DelayKind::kSkew: return "skew";
    case DelayKind::kBoundary: return "boundary";
  }
  return "?";
}

const char* rate_kind_name(RateKind k) {
  switch (k) {
    case RateKind::kConstant: return "constant";
    case RateKind::kExtreme: return "extreme";
    case RateKind::kDrifting: return "drifting";
  }
  return "?";
}

std::optional<DelayKind> parse_delay_kind(const std::string& s) {
  for (auto k : {DelayKind::kUniform, DelayKind::kFastSlow, DelayKind::kSkew, DelayKind::kBoundary})
    if (s == delay_kind_name(k)) return k;
  return std::nullopt;
}

std::optional<RateKind> parse_rate_kind(const std::string& s) {
  for (auto k : {RateKind::kConstant, RateKind::kExtreme, RateKind::kDrifting})
    if (s == rate_kind_name(k)) return k;
  return std::nullopt;
}

sim::DelayPolicy make_delay_policy(DelayKind kind, int n, std::uint64_t seed) {
  switch (kind) {
    case DelayKind::kUniform:
      return sim::uniform_delay();
    case DelayKind::kFastSlow: {
      std::vector<bool> fast(static_cast<std::size_t>(n));
      sim::Rng rng(seed ^ 0xfa57U);
      for (auto&& f : fast) f = (rng() & 1U) != 0;
      return [fast](NodeId, NodeId to, const Message&, RealTime, sim::Rng&) {
        return RealTime{fast[static_cast<std::size_t>(to)] ? kMin : kMax};
      };
    }
    case DelayKind::kSkew: {
      std::vector<std::pair<std::int64_t, std::int64_t>> band(static_cast<std::size_t>(n));
      sim::Rng rng(seed ^ 0x5c3eU);
      for (auto& b : band) {
        std::uniform_int_distribution<std::int64_t> lo(kMin, kMax);
        std::int64_t a = lo(rng);
        std::int64_t c = lo(rng);
        b = {std::min(a, c), std::max(a, c)};
      }
      return [band](NodeId from, NodeId, const Message&, RealTime, sim::Rng& rng) {
        const auto [lo, hi] = band[static_cast<std::size_t>(from)];
        return RealTime{std::uniform_int_distribution<std::int64_t>(lo, hi)(rng)};
      };
    }
    case DelayKind::kBoundary:
      return [](NodeId, NodeId, const Message&, RealTime, sim::Rng& rng) {
        return RealTime{(rng() & 1U) ? kMin : kMax};
      };
  }
  return sim::uniform_delay();
}

std::vector<sim::HardwareClock> make_clocks(RateKind kind, int n, int theta_milli, LocalTime max_offset,
                                            RealTime horizon, sim::Rng& rng) {
  std::uniform_int_distribution<int> rate(1000, theta_milli);
  std::uniform_int_distribution<std::int64_t> offset(0, std::max<std::int64_t>(0, max_offset.units - 1));
  std::vector<sim::HardwareClock> clocks;
  for (int v = 0; v < n; ++v) {
    const LocalTime off{offset(rng)};
    switch (kind) {
      case RateKind::kConstant:
        clocks.emplace_back(off, rate(rng));
        break;
      case RateKind::kExtreme:
        clocks.emplace_back(off, (rng() & 1U) ? theta_milli : 1000);
        break;
      case RateKind::kDrifting: {
        sim::HardwareClock h(off, rate(rng));
        std::uniform_int_distribution<std::int64_t> gap(kTicksPerD, 20 * kTicksPerD);
        for (RealTime t{gap(rng)}; t < horizon; t = t + RealTime{gap(rng)}) h.set_rate_from(t, rate(rng));
        clocks.push_back(std::move(h));
        break;
      }
    }
  }
  return clocks;
}

}  // namespace nic::byz
