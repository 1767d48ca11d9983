#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "plcsim/runtime/runtime.hpp"
#include "plcsim/scenario/scenario.hpp"

namespace plcsim::scenario {

struct AssertionResult {
  std::string label;
  bool passed = false;
  /// Tick at which the assertion failed, when it is bound to one.
  std::optional<std::int64_t> tick;
  std::string detail;
};

struct RunReport {
  std::string scenario;
  std::string strategy;
  std::int64_t ticks = 0;
  std::vector<AssertionResult> assertions;
  /// Header first, then one line per scan.
  std::vector<std::string> trace;

  [[nodiscard]] bool passed() const;
};

/// Called after every scan, e.g. to publish snapshots to a gateway.
using ScanObserver = std::function<void(const Runtime&, const Snapshot&)>;

struct RunOptions {
  RuntimeOptions runtime;
  /// When set, trace lines are written here as they are produced.
  std::ostream* trace_out = nullptr;
  bool keep_trace = true;
  ScanObserver observer;
  /// Before each scan; lets a caller pace the run.
  std::function<void(std::int64_t tick)> before_scan;
  /// After validation, before the first scan. The only place a caller gets
  /// the runtime mutably, e.g. to bind a gateway to its queue.
  std::function<void(Runtime&)> on_built;
  /// After the scripted ticks, scanning continues while this returns true.
  /// These scans reach the observer only; they are not traced or asserted.
  std::function<bool(std::int64_t tick)> linger;
};

/// Checks module paths and other references against a freshly built runtime.
/// Throws ValidationError.
void validate_against_runtime(const Scenario& s, const Runtime& rt);

/// Deterministic headless execution. Throws ValidationError before tick 0.
RunReport run_scenario(const Scenario& s, RunOptions options);

}  // namespace plcsim::scenario
