#include "plcsim/procedural/procedural_strategy.hpp"

namespace plcsim::procedural {

using errors::LocalAction;
using errors::ReactionCode;

DeliveryReport broadcast_reaction(Module& top, ReactionCode code, const ReactionMatrix& matrix, std::int64_t tick,
                                  std::string source) {
  DeliveryReport report{tick, code, std::move(source), {}};
  for (Module* m : preorder(top)) {
    const LocalAction action = matrix.resolve(m->path(), code);
    m->apply_reaction(action);
    report.deliveries.push_back({m->path(), action});
  }
  return report;
}

GateDecision procedural_recover(const RecoveryGate& bit, const CentralExceptionList& list) {
  return bit.check(list.records);
}

ProceduralStrategy::ProceduralStrategy(const errors::ErrorCatalog& catalog, std::optional<ReactionMatrix> matrix)
    : matrix_(std::move(matrix)) {
  list_.catalog = &catalog;
}

void ProceduralStrategy::bind(Module& root) {
  for (Module* m : preorder(root)) m->binding().bind_template(list_);
  if (!matrix_) matrix_ = ReactionMatrix::derive_default(root);
  for (auto& w : matrix_->check_against(root)) audit_.push_back(std::move(w));
}

modes::CommandResult ProceduralStrategy::operator_override(ReactionCode code) {
  override_ = code;
  return {true, {}};
}

ReactionResult ProceduralStrategy::react(Module& root, const ScanContext& ctx) {
  ReactionResult result;
  std::optional<ReactionCode> chosen;
  bool critical = false;
  for (const auto& r : list_.records) {
    if (r.id <= watermark_) continue;
    const ReactionCode code = list_.catalog->reaction_for(r.event.number);
    if (code.is_none()) continue;
    if (!chosen || errors::reaction_priority(code) < errors::reaction_priority(*chosen)) chosen = code;
    if (errors::requires_reaction(r.event.severity)) critical = true;
  }
  watermark_ = list_.next_id - 1;

  int best_rank = action_rank(LocalAction::Ignore);
  auto deliver = [&](ReactionCode code, const char* source) {
    auto report = broadcast_reaction(root, code, *matrix_, ctx.tick, source);
    const LocalAction unit_action = report.action_of(root.path());
    if (action_rank(unit_action) < best_rank) {
      best_rank = action_rank(unit_action);
      result.command = command_for(unit_action);
    }
    audit_.push_back("broadcast code " + std::to_string(code.value()) + " (" + source + ")");
    result.reports.push_back(std::move(report));
  };

  if (chosen) {
    deliver(*chosen, "automatic");
    if (critical) gate_.arm();
  }
  if (override_) {
    deliver(*override_, "operator");
    override_.reset();
  }
  return result;
}

std::vector<std::string> ProceduralStrategy::take_audit() {
  std::vector<std::string> out = std::move(audit_);
  audit_.clear();
  for (auto& l : list_.audit) out.push_back(std::move(l));
  list_.audit.clear();
  return out;
}

}  // namespace plcsim::procedural
