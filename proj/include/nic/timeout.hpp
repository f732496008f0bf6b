#pragma once

#include <optional>

#include "nic/units.hpp"

namespace nic {

/// A local-time alarm. Expired when never reset, when `duration` local time
/// has passed since the last reset, or when the recorded reset lies in the
/// future (only possible from a corrupted initial state).
class Timeout {
 public:
  Timeout() = default;
  explicit Timeout(LocalTime duration) : duration_(duration) {}

  void reset(LocalTime now) { last_reset_ = now; }
  void force_expire() { last_reset_.reset(); }

  bool expired(LocalTime now) const {
    if (!last_reset_) return true;
    if (*last_reset_ > now) return true;
    return now - *last_reset_ >= duration_;
  }

  /// Local time at which a running timeout expires, if it is running.
  std::optional<LocalTime> expires_at(LocalTime now) const {
    if (expired(now)) return std::nullopt;
    return *last_reset_ + duration_;
  }

  LocalTime duration() const { return duration_; }
  std::optional<LocalTime> last_reset() const { return last_reset_; }
  void set_last_reset(std::optional<LocalTime> v) { last_reset_ = v; }

 private:
  LocalTime duration_{};
  std::optional<LocalTime> last_reset_{};
};

}  // namespace nic
