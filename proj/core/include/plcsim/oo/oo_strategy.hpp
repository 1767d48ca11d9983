#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "plcsim/oo/error_manager.hpp"
#include "plcsim/runtime/error_strategy.hpp"

namespace plcsim::oo {

/// Property-set injection of the sink. Throws BuildError when already set.
void inject_sink(Module& module, ErrorSink& sink);

/// Own subtree at Error -> AbortNow; own subtree or a neighbor (siblings and
/// the parent EM) at Malfunction or above -> StopEndOfCycle; otherwise Ignore.
errors::LocalAction decide_local_reaction(const Module& module, const NeighborStatusQuery& query);

/// Same contract as the procedural recovery bit.
GateDecision oo_recover(const RecoveryGate& gate, const ErrorManager& manager);

enum class ManagerKind { Base, Extended, Noop };

/// Callback-based error handling: one ErrorManager behind an ErrorSink handle
/// in every module, reactions decided by the modules from neighbor status.
class OoStrategy final : public ErrorStrategy {
 public:
  explicit OoStrategy(const errors::ErrorCatalog& catalog, ManagerKind kind = ManagerKind::Base);

  [[nodiscard]] std::string_view name() const override { return "oo"; }
  void bind(Module& root) override;
  void begin_scan(std::int64_t tick) override { manager_->set_tick(tick); }
  [[nodiscard]] std::vector<errors::ErrorRecord> active_list() const override { return manager_->published(); }
  ReactionResult react(Module& root, const ScanContext& ctx) override;
  modes::CommandResult operator_override(errors::ReactionCode code) override;
  errors::AckOutcome acknowledge(std::optional<errors::RecordId> id) override { return manager_->acknowledge(id); }
  void clear_acknowledged() override { manager_->clear_acknowledged(); }
  std::vector<std::string> take_audit() override;
  [[nodiscard]] GateDecision recover() const override { return oo_recover(gate_, *manager_); }

  [[nodiscard]] ManagerKind manager_kind() const { return kind_; }
  [[nodiscard]] const ErrorManager& manager() const { return *manager_; }
  /// The instance every module reports to.
  [[nodiscard]] const ErrorSink& sink() const { return *sink_; }

 private:
  const errors::ErrorCatalog* catalog_;
  ManagerKind kind_;
  std::unique_ptr<ErrorManager> manager_;
  std::unique_ptr<NullErrorSink> null_sink_;
  ErrorSink* sink_ = nullptr;
  errors::RecordId watermark_ = 0;
  std::optional<errors::ReactionCode> override_;
  std::vector<std::string> audit_;
};

}  // namespace plcsim::oo
