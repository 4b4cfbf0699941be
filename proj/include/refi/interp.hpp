#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "refi/compiler.hpp"
#include "refi/interaction.hpp"
#include "refi/typer.hpp"
#include "refi/value.hpp"

namespace refi::interp {

struct Firing {
  SourceSpec source;
  Value payload;
};

/// All sources firing in one update cycle. A batch without firings is legal
/// and only advances time (it still lets timers fire up to its timestamp).
struct EventBatch {
  std::int32_t t_ms = 0;
  std::vector<Firing> firings;
};

using Trace = std::vector<EventBatch>;

struct EffectRecord {
  std::int32_t t_ms = 0;
  EffectKind effect = EffectKind::SendToOS;
  Value value;
  TypeTag type;

  friend bool operator==(const EffectRecord& a, const EffectRecord& b) {
    return a.t_ms == b.t_ms && a.effect == b.effect && a.type == b.type && a.value == b.value;
  }
};

using EffectLog = std::vector<EffectRecord>;

/// A cycle that was aborted because a function body failed.
struct CycleError {
  std::int32_t t_ms = 0;
  std::string message;

  friend bool operator==(const CycleError&, const CycleError&) = default;
};

struct RunStats {
  std::uint64_t cycles = 0;
  std::uint64_t guard_checks = 0;   // group guards (runtime) or per-definition checks (oracle)
  std::uint64_t inner_checks = 0;   // choice operand and fold-all arm tests
  std::uint64_t max_checks_per_cycle = 0;
  std::uint64_t function_calls = 0;
  std::vector<CycleError> errors;
};

/// Malformed traces (unordered timestamps, duplicate sources in a batch,
/// timer firings supplied externally).
class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Merges batches with equal timestamps and inserts timer firings: a
/// Timer(p) fires at every positive multiple of p up to the last timestamp
/// of the trace.
Trace schedule_timers(const Trace& external, const std::vector<int>& timer_periods);

/// Timer periods used by a program's sources (sorted, unique).
std::vector<int> timer_periods(const typer::TypedProgram& tp);

/// Called after each definition is considered by the oracle: definition
/// index and whether it triggered in the current cycle.
using Probe = std::function<void(std::uint64_t cycle, int def, bool triggered)>;

/// Reference runtime executing the grouped schedule.
class Runtime {
 public:
  explicit Runtime(const CompiledProgram& program);

  /// Executes one cycle; returns the cycle's effects (empty when aborted).
  EffectLog step(const EventBatch& batch);

  const RunStats& stats() const { return stats_; }
  /// Current state of a persistent node, by name.
  std::optional<Value> state(const std::string& node) const;

 private:
  const CompiledProgram& program_;
  std::vector<std::optional<Value>> state_;  // by node id
  RunStats stats_;
};

/// Runs the grouped runtime over a trace (timers are injected).
EffectLog run_trace(const CompiledProgram& program, const Trace& trace, RunStats* stats = nullptr);

/// Independent oracle: every definition is translated on its own and
/// guarded by its own trigger test, without grouping, dead-code
/// elimination or early reclamation.
EffectLog oracle_run(const typer::TypedProgram& program, const Trace& trace, RunStats* stats = nullptr,
                     const Probe& probe = {});

Json to_json(const EffectRecord& r);

}  // namespace refi::interp
