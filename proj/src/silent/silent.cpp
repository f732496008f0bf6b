#include "nic/silent/silent.hpp"

namespace nic::silent {

namespace {

int count_ones(const Inbox& inbox) {
  int c = 0;
  for (const auto& p : inbox)
    if (p && p->size() == 1 && p->bit(0)) ++c;
  return c;
}

class SilentInstance final : public ProtocolInstance {
 public:
  SilentInstance(std::shared_ptr<const Protocol> inner, NodeId self, int input)
      : inner_(std::move(inner)), self_(self) {
    view_.input = input ? 1 : 0;
  }

  SilentInstance(const SilentInstance& o)
      : inner_(o.inner_), self_(o.self_), view_(o.view_), sent_any_(o.sent_any_),
        state_(o.state_ ? o.state_->clone() : nullptr) {}

  Outbox send(int round) override {
    const auto n = static_cast<std::size_t>(inner_->n());
    Outbox out(n);
    if (round <= 2) {
      if (view_.input == 1) {
        for (auto& p : out) p = Payload::single(true);
        view_.bits_sent += static_cast<std::int64_t>(n);
        sent_any_ = true;
      }
      return out;
    }
    if (!state_ || view_.aborted) return out;
    Outbox inner = state_->send(round - 2);
    const std::int64_t bits = outbox_bits(inner);
    if (view_.bits_sent + bits > inner_->bit_bound() + 2 * inner_->n()) {
      view_.aborted = true;
      state_.reset();
      return out;
    }
    view_.bits_sent += bits;
    if (bits > 0) sent_any_ = true;
    return inner;
  }

  void receive(int round, const Inbox& inbox) override {
    const int n = inner_->n();
    const int f = inner_->f();
    if (round == 1) {
      view_.r1 = count_ones(inbox);
      if (view_.r1 < n - f) view_.input = 0;
      view_.inner_active = view_.r1 >= f + 1;
      return;
    }
    if (round == 2) {
      view_.r2 = count_ones(inbox);
      if (view_.r2 < n - f) view_.input = 0;
      if (view_.inner_active) state_ = inner_->start(self_, view_.input);
      return;
    }
    if (state_ && !view_.aborted) state_->receive(round - 2, inbox);
  }

  int output() const override {
    if (!view_.inner_active || view_.aborted || !state_ || view_.r2 <= inner_->f()) return 0;
    return state_->output();
  }

  bool nontrivial() const override { return view_.inner_active || sent_any_; }

  std::unique_ptr<ProtocolInstance> clone() const override { return std::make_unique<SilentInstance>(*this); }

  std::string fingerprint() const override {
    std::string s = std::to_string(view_.input) + "/" + std::to_string(view_.r1) + "/" + std::to_string(view_.r2) +
                    (view_.inner_active ? "A" : "a") + (view_.aborted ? "X" : "x") + std::to_string(view_.bits_sent);
    if (state_) s += "|" + state_->fingerprint();
    return s;
  }

  const SilentView& view() const { return view_; }

 private:
  std::shared_ptr<const Protocol> inner_;
  NodeId self_;
  SilentView view_;
  bool sent_any_{false};
  std::unique_ptr<ProtocolInstance> state_;
};

}  // namespace

SilentProtocol::SilentProtocol(std::shared_ptr<const Protocol> inner)
    : Protocol(inner->n(), inner->f()), inner_(std::move(inner)) {
  if (3 * f() >= n()) throw ModelError("silent wrapper needs f < n/3");
}

std::unique_ptr<ProtocolInstance> SilentProtocol::start(NodeId self, int input) const {
  return std::make_unique<SilentInstance>(inner_, self, input);
}

std::optional<SilentView> inspect(const ProtocolInstance& inst) {
  if (const auto* s = dynamic_cast<const SilentInstance*>(&inst)) return s->view();
  return std::nullopt;
}

}  // namespace nic::silent
