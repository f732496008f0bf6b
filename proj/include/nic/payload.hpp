#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace nic {

/// A protocol payload as a string of bits. Bit accounting charges size().
class Payload {
 public:
  Payload() = default;
  Payload(std::initializer_list<int> bits);
  static Payload from_string(const std::string& bits);
  static Payload single(bool bit) { return Payload{bit ? 1 : 0}; }

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  bool bit(std::size_t i) const { return bits_.at(i) != 0; }
  void push(bool b) { bits_.push_back(b ? 1 : 0); }

  /// "0110"-style rendering; the inverse of from_string.
  std::string to_string() const;

  /// Length-prefixed byte serialization: a 32-bit little-endian bit count
  /// followed by the bits packed LSB-first.
  std::vector<std::uint8_t> serialize() const;
  static Payload deserialize(const std::vector<std::uint8_t>& bytes);

  bool operator==(const Payload&) const = default;
  auto operator<=>(const Payload&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

}  // namespace nic
