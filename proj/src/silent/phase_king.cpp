#include "nic/silent/phase_king.hpp"

#include <array>

namespace nic::silent {

std::int64_t outbox_bits(const Outbox& out) {
  std::int64_t total = 0;
  for (const auto& p : out)
    if (p) total += static_cast<std::int64_t>(p->size());
  return total;
}

namespace {

std::optional<int> as_bit(const std::optional<Payload>& p) {
  if (!p || p->size() != 1) return std::nullopt;
  return p->bit(0) ? 1 : 0;
}

class PhaseKingInstance final : public ProtocolInstance {
 public:
  PhaseKingInstance(int n, int f, NodeId self, int input) : n_(n), f_(f), self_(self), value_(input ? 1 : 0) {}

  Outbox send(int round) override {
    Outbox out(static_cast<std::size_t>(n_));
    const int phase = (round - 1) / 3;
    std::optional<int> bit;
    switch ((round - 1) % 3) {
      case 0: bit = value_; break;
      case 1: bit = proposal_; break;
      case 2: if (phase == self_) bit = value_; break;
    }
    if (bit)
      for (auto& p : out) p = Payload::single(*bit == 1);
    return out;
  }

  void receive(int round, const Inbox& inbox) override {
    std::array<int, 2> count{0, 0};
    for (const auto& p : inbox)
      if (auto b = as_bit(p)) ++count[*b];
    const int phase = (round - 1) / 3;
    switch ((round - 1) % 3) {
      case 0:
        proposal_.reset();
        for (int b = 0; b < 2; ++b)
          if (count[b] >= n_ - f_) proposal_ = b;
        break;
      case 1:
        strong_ = false;
        for (int b = 0; b < 2; ++b) {
          if (count[b] > f_) value_ = b;
          if (count[b] >= n_ - f_) strong_ = true;
        }
        break;
      case 2:
        if (!strong_) {
          const auto king = phase < static_cast<int>(inbox.size()) ? as_bit(inbox[phase]) : std::nullopt;
          value_ = king.value_or(0);
        }
        break;
    }
  }

  int output() const override { return value_; }

  std::unique_ptr<ProtocolInstance> clone() const override { return std::make_unique<PhaseKingInstance>(*this); }

  std::string fingerprint() const override {
    std::string s;
    s += static_cast<char>('0' + value_);
    s += proposal_ ? static_cast<char>('0' + *proposal_) : '-';
    s += strong_ ? 'S' : 'w';
    return s;
  }

 private:
  int n_;
  int f_;
  NodeId self_;
  int value_;
  std::optional<int> proposal_;
  bool strong_{false};
};

}  // namespace

PhaseKing::PhaseKing(int n, int f) : Protocol(n, f) {
  if (f < 0 || 3 * f >= n) throw ModelError("phase king needs f < n/3");
}

std::unique_ptr<ProtocolInstance> PhaseKing::start(NodeId self, int input) const {
  return std::make_unique<PhaseKingInstance>(n(), f(), self, input);
}

}  // namespace nic::silent
