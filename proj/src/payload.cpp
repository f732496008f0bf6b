#include "nic/payload.hpp"

#include <stdexcept>

namespace nic {

Payload::Payload(std::initializer_list<int> bits) {
  for (int b : bits) bits_.push_back(b ? 1 : 0);
}

Payload Payload::from_string(const std::string& bits) {
  Payload p;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("payload: expected 0/1, got '" + bits + "'");
    p.push(c == '1');
  }
  return p;
}

std::string Payload::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

std::vector<std::uint8_t> Payload::serialize() const {
  std::vector<std::uint8_t> out;
  const auto len = static_cast<std::uint32_t>(bits_.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
  out.resize(4 + (len + 7) / 8, 0);
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out[4 + i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  return out;
}

Payload Payload::deserialize(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4) throw std::invalid_argument("payload: truncated length prefix");
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  if (bytes.size() != 4 + (len + 7) / 8) throw std::invalid_argument("payload: length mismatch");
  Payload p;
  for (std::uint32_t i = 0; i < len; ++i) p.push((bytes[4 + i / 8] >> (i % 8)) & 1u);
  return p;
}

}  // namespace nic
