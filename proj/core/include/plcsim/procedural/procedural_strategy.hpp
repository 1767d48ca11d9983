#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plcsim/procedural/exception_list.hpp"
#include "plcsim/procedural/reaction_matrix.hpp"
#include "plcsim/runtime/error_strategy.hpp"

namespace plcsim::procedural {

/// Writes `code` top-down through the hierarchy; every module resolves it
/// through its own line set in the same scan.
DeliveryReport broadcast_reaction(Module& top, errors::ReactionCode code, const ReactionMatrix& matrix,
                                  std::int64_t tick, std::string source);

/// Gate decision of the machine-level recovery bit.
GateDecision procedural_recover(const RecoveryGate& bit, const CentralExceptionList& list);

/// Template-based error handling: one global exception list, a central POU
/// that picks a reaction code and broadcasts it, per-module reaction matrices.
class ProceduralStrategy final : public ErrorStrategy {
 public:
  /// Without a matrix the default one is derived from the hierarchy at bind time.
  explicit ProceduralStrategy(const errors::ErrorCatalog& catalog, std::optional<ReactionMatrix> matrix = std::nullopt);

  [[nodiscard]] std::string_view name() const override { return "procedural"; }
  void bind(Module& root) override;
  void begin_scan(std::int64_t /*tick*/) override {}
  [[nodiscard]] std::vector<errors::ErrorRecord> active_list() const override { return fc_active_records(list_); }
  ReactionResult react(Module& root, const ScanContext& ctx) override;
  modes::CommandResult operator_override(errors::ReactionCode code) override;
  errors::AckOutcome acknowledge(std::optional<errors::RecordId> id) override { return fc_acknowledge(list_, id); }
  void clear_acknowledged() override { fc_clear_acknowledged(list_); }
  std::vector<std::string> take_audit() override;
  [[nodiscard]] GateDecision recover() const override { return procedural_recover(gate_, list_); }

  /// The global list. Anyone holding the strategy can reach it.
  [[nodiscard]] CentralExceptionList& exception_list() { return list_; }
  [[nodiscard]] const ReactionMatrix& matrix() const { return *matrix_; }
  [[nodiscard]] bool recovery_bit() const { return gate_.pending(); }

 private:
  CentralExceptionList list_;
  std::optional<ReactionMatrix> matrix_;
  errors::RecordId watermark_ = 0;
  std::optional<errors::ReactionCode> override_;
  std::vector<std::string> audit_;
};

}  // namespace plcsim::procedural
