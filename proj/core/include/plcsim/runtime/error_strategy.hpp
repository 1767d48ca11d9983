#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plcsim/errors/catalog.hpp"
#include "plcsim/errors/error_event.hpp"
#include "plcsim/errors/reaction.hpp"
#include "plcsim/modes/machine.hpp"
#include "plcsim/modes/mode_manager.hpp"
#include "plcsim/runtime/module.hpp"

namespace plcsim {

/// One module's share of a delivered reaction.
struct Delivery {
  ModulePath path;
  errors::LocalAction action = errors::LocalAction::Ignore;

  bool operator==(const Delivery&) const = default;
};

struct DeliveryReport {
  std::int64_t tick = 0;
  errors::ReactionCode code;
  /// "automatic", "operator" or "local".
  std::string source;
  /// Every module exactly once, in evaluation order.
  std::vector<Delivery> deliveries;

  [[nodiscard]] errors::LocalAction action_of(const ModulePath& path) const;
};

struct ReactionResult {
  std::optional<modes::StateCommand> command;
  std::vector<DeliveryReport> reports;
};

/// Machine command a Unit-level local action stands for.
std::optional<modes::StateCommand> command_for(errors::LocalAction action);

struct GateDecision {
  bool open = true;
  std::string reason;
};

/// Blocks the return to Automatic after a reaction to a Malfunction or Error
/// until the operator acknowledged, visited Manual or Jog and cleared or reset
/// the machine.
class RecoveryGate {
 public:
  void arm();
  [[nodiscard]] bool pending() const { return pending_; }
  void observe(modes::MachineState s, modes::OperatingMode m);
  [[nodiscard]] GateDecision check(const std::vector<errors::ErrorRecord>& records) const;
  void release() { pending_ = false; }

 private:
  bool pending_ = false;
  bool visited_manual_ = false;
  bool cleared_ = false;
};

/// The four error-handling phases as seen by the runtime. Identification and
/// reporting happen inside the modules through their ReportBinding; the
/// strategy owns storage, reaction and the recovery gate.
class ErrorStrategy {
 public:
  virtual ~ErrorStrategy() = default;

  [[nodiscard]] virtual std::string_view name() const = 0;
  /// Wires every module's reporting. Throws BuildError on double binding.
  virtual void bind(Module& root) = 0;
  virtual void begin_scan(std::int64_t tick) = 0;
  /// Records that are not Cleared, in insertion order.
  [[nodiscard]] virtual std::vector<errors::ErrorRecord> active_list() const = 0;
  /// Phase 5.
  virtual ReactionResult react(Module& root, const ScanContext& ctx) = 0;
  /// Operator-chosen reaction code, delivered in the next reaction phase.
  virtual modes::CommandResult operator_override(errors::ReactionCode code) = 0;
  virtual errors::AckOutcome acknowledge(std::optional<errors::RecordId> id) = 0;
  virtual void clear_acknowledged() = 0;
  virtual std::vector<std::string> take_audit() = 0;

  void observe(modes::MachineState s, modes::OperatingMode m) { gate_.observe(s, m); }
  [[nodiscard]] bool recovery_pending() const { return gate_.pending(); }
  /// The gate decision for a request to switch to Automatic.
  [[nodiscard]] virtual GateDecision recover() const = 0;
  void recovery_done() { gate_.release(); }

 protected:
  RecoveryGate gate_;
};

}  // namespace plcsim
