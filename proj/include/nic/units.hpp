#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace nic {

using NodeId = std::int32_t;

// Fixed-point time base. One delay bound d is kTicksPerD reference ticks.
// Hardware clock rates are integers in thousandths (1000 = rate 1), so a
// node's clock advances `rate` local units per reference tick and every
// protocol constant of the form c * theta^k * d is an exact integer.
inline constexpr std::int64_t kTicksPerD = 8000;
inline constexpr std::int64_t kRateScale = 1000;
inline constexpr std::int64_t kLocalPerD = kTicksPerD * kRateScale;

/// Reference ("real") time, never visible to correct node logic.
struct RealTime {
  std::int64_t ticks{0};

  constexpr auto operator<=>(const RealTime&) const = default;
  constexpr RealTime operator+(RealTime o) const { return {ticks + o.ticks}; }
  constexpr RealTime operator-(RealTime o) const { return {ticks - o.ticks}; }

  static constexpr RealTime from_d(double x) {
    return {static_cast<std::int64_t>(x * static_cast<double>(kTicksPerD) + (x >= 0 ? 0.5 : -0.5))};
  }
  constexpr double in_d() const { return static_cast<double>(ticks) / static_cast<double>(kTicksPerD); }
};

/// A hardware clock reading or a local-time duration.
struct LocalTime {
  std::int64_t units{0};

  constexpr auto operator<=>(const LocalTime&) const = default;
  constexpr LocalTime operator+(LocalTime o) const { return {units + o.units}; }
  constexpr LocalTime operator-(LocalTime o) const { return {units - o.units}; }
  constexpr LocalTime operator*(std::int64_t k) const { return {units * k}; }
  constexpr LocalTime& operator+=(LocalTime o) {
    units += o.units;
    return *this;
  }

  static constexpr LocalTime from_d(double x) {
    return {static_cast<std::int64_t>(x * static_cast<double>(kLocalPerD) + (x >= 0 ? 0.5 : -0.5))};
  }
  constexpr double in_d() const { return static_cast<double>(units) / static_cast<double>(kLocalPerD); }
};

/// A clock value as carried in messages: a quantized reading modulo the
/// clock modulus. Values are always in [0, modulus).
struct Stamp {
  std::int64_t value{0};
  constexpr auto operator<=>(const Stamp&) const = default;
};

/// Nearest-representative signed difference a - b in (-modulus/2, modulus/2].
constexpr std::int64_t mod_diff(Stamp a, Stamp b, std::int64_t modulus) {
  std::int64_t d = (a.value - b.value) % modulus;
  if (d < 0) d += modulus;
  if (d > modulus / 2) d -= modulus;
  return d;
}

constexpr std::int64_t mod_distance(Stamp a, Stamp b, std::int64_t modulus) {
  const std::int64_t d = mod_diff(a, b, modulus);
  return d < 0 ? -d : d;
}

constexpr Stamp wrap(std::int64_t v, std::int64_t modulus) {
  std::int64_t r = v % modulus;
  if (r < 0) r += modulus;
  return Stamp{r};
}

/// Identifies a consensus instance: the initiator and its claimed clock.
struct InstanceLabel {
  NodeId initiator{0};
  Stamp stamp{};
  constexpr auto operator<=>(const InstanceLabel&) const = default;
};

std::string to_string(const InstanceLabel& label);

/// Parses a drift bound such as "1.1" into thousandths, exactly.
int parse_theta_milli(const std::string& text);

constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

constexpr int ceil_log2(std::int64_t x) {
  int bits = 0;
  std::int64_t v = 1;
  while (v < x) {
    v <<= 1;
    ++bits;
  }
  return bits;
}

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nic

template <>
struct std::hash<nic::InstanceLabel> {
  std::size_t operator()(const nic::InstanceLabel& l) const noexcept {
    return std::hash<std::int64_t>{}(l.stamp.value * 1315423911LL + l.initiator);
  }
};
