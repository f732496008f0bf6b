#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <set>
#include <vector>

#include "nic/messages.hpp"
#include "nic/sim/hardware_clock.hpp"
#include "nic/sim/process.hpp"
#include "nic/sim/trace.hpp"

namespace nic::sim {

using Rng = std::mt19937_64;

/// Chooses the delivery delay of an envelope; must return a value in (0, d).
using DelayPolicy = std::function<RealTime(NodeId from, NodeId to, const Message&, RealTime sent, Rng&)>;

/// Event-kind rank used as the second tie-break key.
enum class EventKind : std::uint8_t { kThreshold = 0, kDelivery = 1, kCommand = 2, kProbe = 3 };

struct Event {
  RealTime time{};
  EventKind kind{EventKind::kThreshold};
  NodeId node{0};
  std::int64_t aux{0};     // threshold value or envelope id
  std::uint64_t seq{0};    // assigned by the kernel

  NodeId from{-1};
  std::shared_ptr<const Message> msg{};
  bool garbage{false};
  Command command{};

  /// Lexicographic (time, kind rank, node, aux, seq).
  bool before(const Event& o) const;
};

struct KernelConfig {
  int n{4};
  std::uint64_t seed{1};
  DelayPolicy delay{};
  RealTime probe_period{RealTime{0}};   // 0 disables probes
  std::uint64_t step_budget{1'000'000};  // per handler invocation
  bool record_update_deliveries{true};
};

class Kernel {
 public:
  Kernel(KernelConfig config, std::vector<HardwareClock> clocks,
         std::vector<std::unique_ptr<Process>> processes, WireFormat wire);

  RealTime now() const { return now_; }
  int n() const { return config_.n; }

  /// Calls on_start for every process. Must happen at time 0.
  void start();

  void schedule(Event event);
  void run_until(RealTime deadline);

  LocalTime local_clock(NodeId node, RealTime t) const;
  void set_threshold(NodeId node, LocalTime value);

  /// Queues an arbitrary envelope on a channel before time d (initial
  /// channel contents). Only valid before the run starts.
  void inject_garbage(NodeId from, NodeId to, Message msg, RealTime deliver_at);

  void command(NodeId node, RealTime at, Command cmd);

  const Trace& trace() const { return trace_; }
  Trace take_trace() { return std::move(trace_); }
  Process& process(NodeId v) { return *processes_.at(static_cast<std::size_t>(v)); }
  const Process& process(NodeId v) const { return *processes_.at(static_cast<std::size_t>(v)); }
  const HardwareClock& clock(NodeId v) const { return clocks_.at(static_cast<std::size_t>(v)); }
  Rng& rng() { return rng_; }
  std::size_t pending_events() const { return queue_.size(); }

 private:
  class Context;
  friend class Context;

  void push(Event e);
  Event pop();
  void dispatch(const Event& e);
  void deliver(NodeId from, NodeId to, std::shared_ptr<const Message> msg, std::uint64_t env, bool garbage);
  void send_from(NodeId from, NodeId to, Message msg, std::optional<RealTime> forced_delay);
  void run_probe();
  void push_threshold(NodeId node, LocalTime value);

  KernelConfig config_;
  std::vector<HardwareClock> clocks_;
  std::vector<std::unique_ptr<Process>> processes_;
  WireFormat wire_;
  Rng rng_;
  RealTime now_{0};
  bool started_{false};
  std::vector<Event> queue_;  // binary heap ordered by Event::before
  std::uint64_t next_seq_{1};
  std::uint64_t next_envelope_{1};
  std::vector<std::set<std::int64_t>> pending_thresholds_;
  Trace trace_;
  std::uint64_t steps_{0};
};

/// Default adversarial delay: uniform over [eps*d, d - eps*d] with eps = 1/64.
DelayPolicy uniform_delay();

}  // namespace nic::sim
