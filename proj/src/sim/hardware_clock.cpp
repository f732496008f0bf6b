#include "nic/sim/hardware_clock.hpp"

#include <algorithm>

namespace nic::sim {

HardwareClock::HardwareClock(LocalTime offset, int rate_milli) {
  if (rate_milli <= 0) throw ModelError("clock rate must be positive");
  segments_.push_back({RealTime{0}, rate_milli, offset});
}

void HardwareClock::set_rate_from(RealTime start, int rate_milli) {
  if (rate_milli <= 0) throw ModelError("clock rate must be positive");
  const Segment& last = segments_.back();
  if (start <= last.start) throw ModelError("clock segments must be added in increasing order");
  segments_.push_back({start, rate_milli, at(start)});
}

const HardwareClock::Segment& HardwareClock::segment_for(RealTime t) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](RealTime x, const Segment& s) { return x < s.start; });
  if (it == segments_.begin()) return segments_.front();
  return *std::prev(it);
}

LocalTime HardwareClock::at(RealTime t) const {
  const Segment& s = segment_for(t);
  return s.at_start + LocalTime{(t.ticks - s.start.ticks) * s.rate_milli};
}

int HardwareClock::rate_at(RealTime t) const { return segment_for(t).rate_milli; }

RealTime HardwareClock::first_reaching(LocalTime value) const {
  // Last segment whose starting reading is <= value.
  auto it = std::upper_bound(segments_.begin(), segments_.end(), value,
                             [](LocalTime v, const Segment& s) { return v < s.at_start; });
  if (it == segments_.begin()) return segments_.front().start;
  const Segment& s = *std::prev(it);
  const std::int64_t need = value.units - s.at_start.units;
  return RealTime{s.start.ticks + ceil_div(need, s.rate_milli)};
}

}  // namespace nic::sim
