#pragma once

#include <vector>

#include "nic/units.hpp"

namespace nic::sim {

/// Piecewise-constant-rate hardware clock.
///
/// H(t) = offset + integral of rate over [0, t]. Rates are in thousandths,
/// so a clock at rate r advances r local units per reference tick. All
/// arithmetic is exact.
class HardwareClock {
 public:
  struct Segment {
    RealTime start;
    int rate_milli;
    LocalTime at_start;
  };

  explicit HardwareClock(LocalTime offset = {}, int rate_milli = 1000);

  /// Changes the rate from `start` on. Segments must be added in order.
  void set_rate_from(RealTime start, int rate_milli);

  LocalTime at(RealTime t) const;

  /// Smallest tick t with at(t) >= value.
  RealTime first_reaching(LocalTime value) const;

  int rate_at(RealTime t) const;
  const std::vector<Segment>& segments() const { return segments_; }

 private:
  const Segment& segment_for(RealTime t) const;
  std::vector<Segment> segments_;
};

}  // namespace nic::sim
