#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nic/harness/run.hpp"

namespace nic::harness {

/// What one correct node did in one instance, reconstructed from the trace.
struct NodeView {
  RealTime joined{};
  int input{0};
  int confidence{0};
  std::map<int, RealTime> crossed;  // round -> time
  std::optional<RealTime> ended;
  int output{0};
  sim::EndReason reason{sim::EndReason::kNormal};
  // inbox[r][u]: payload stored from u for round r before the node used it.
  std::vector<std::vector<std::optional<std::optional<Payload>>>> inbox;
  // sent[r][w]: payload sent to w in round r (own frame included).
  std::vector<std::vector<std::optional<std::optional<Payload>>>> sent;
};

struct InstanceView {
  InstanceLabel label;
  std::optional<RealTime> initiated;  // when a correct initiator started it
  std::map<NodeId, NodeView> nodes;   // correct participants only

  std::optional<RealTime> first_join() const;
  std::optional<RealTime> last_end() const;
  bool any_nonzero_input() const;
};

struct TraceIndex {
  std::vector<InstanceView> instances;
};

TraceIndex index_trace(const sim::Trace& trace, const Resolved& r);

/// One evaluated property. `measured` carries the constants it observed.
struct Check {
  Check(std::string id_, std::string title_) : id(std::move(id_)), title(std::move(title_)) {}

  std::string id;
  std::string title;
  bool pass{true};
  std::int64_t examined{0};
  nlohmann::json measured = nlohmann::json::object();
  std::vector<std::string> counterexamples;
  // Where the first counterexample lives, and the trace records around it.
  std::optional<InstanceLabel> focus_label;
  std::optional<RealTime> focus_time;
  std::vector<std::string> slice;

  void fail(const std::string& why);
  void fail(const std::string& why, const InstanceLabel& at);
  void fail(const std::string& why, RealTime at);
};

struct Verdict {
  std::vector<Check> checks;
  double stabilization_bound{0};     // S = 10 (R + T), in d
  double measured_stabilization{0};  // end of the last failing instance, in d
  bool pass() const;
  const Check* find(const std::string& id) const;
  nlohmann::json to_json() const;
};

struct Ceilings {
  double k2{8};
  double k5{8};
  double c_bits{64};
  double k1{16};
};

/// Instances counted by the post-stabilization checks: some correct node
/// terminated (or, lacking an output, was due to terminate) after `after`.
/// Instances joined within `lifetime` of `horizon` are left out.
std::vector<const InstanceView*> instances_after(const TraceIndex& idx, RealTime after, RealTime horizon,
                                                 RealTime lifetime);

Check check_oracle_equivalence(const RunResult& run, const TraceIndex& idx);
Check check_agreement(const RunResult& run, const TraceIndex& idx);
Check check_timing(const RunResult& run, const TraceIndex& idx, const Ceilings& ceil = {});
Check check_silence(const RunResult& run, const TraceIndex& idx);
Check check_clock_accuracy(const RunResult& run);
Check check_bits(const RunResult& run, const Ceilings& ceil = {});
Check check_envelope(const RunResult& run, const Ceilings& ceil = {});

/// Earliest time after which every terminating instance passes the
/// agreement, oracle and silence checks (0 when all pass).
double measured_stabilization(const RunResult& run, const TraceIndex& idx);

/// Runs every check applicable to a single run. Failed checks carry the
/// trace records around their first counterexample.
Verdict evaluate(const RunResult& run, const Ceilings& ceil = {});

/// Trace records for one instance, or for a short window around a time.
std::vector<std::string> trace_slice(const sim::Trace& trace, const InstanceLabel& label, std::size_t limit = 200);
std::vector<std::string> trace_slice(const sim::Trace& trace, RealTime at, double radius, std::size_t limit = 200);

/// Clock-accuracy start: time after the last violating probe sample.
std::optional<double> clock_settle_time(const RunResult& run);

/// Per-node metrics over consecutive windows of the given length (in d).
struct MetricsRow {
  NodeId node;
  double window_start;
  std::int64_t infra_bits;
  std::int64_t instance_bits;
  int instances_joined;
  int quarantines;
};
std::vector<MetricsRow> metrics(const RunResult& run, double window);
std::string format_metrics(const std::vector<MetricsRow>& rows);

}  // namespace nic::harness
