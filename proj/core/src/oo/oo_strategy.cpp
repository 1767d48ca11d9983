#include "plcsim/oo/oo_strategy.hpp"

namespace plcsim::oo {

using errors::LocalAction;
using errors::ReactionCode;
using errors::Severity;

void inject_sink(Module& module, ErrorSink& sink) { module.binding().slot().set(sink); }

LocalAction decide_local_reaction(const Module& module, const NeighborStatusQuery& query) {
  const auto own = query.status_of(module.path()).severity_max;
  if (own && *own == Severity::Error) return LocalAction::AbortNow;
  if (own && *own >= Severity::Malfunction) return LocalAction::StopEndOfCycle;
  for (const auto& n : neighbors_of(module)) {
    const auto s = query.status_of(n).severity_max;
    if (s && *s >= Severity::Malfunction) return LocalAction::StopEndOfCycle;
  }
  return LocalAction::Ignore;
}

GateDecision oo_recover(const RecoveryGate& gate, const ErrorManager& manager) {
  return gate.check(manager.published());
}

OoStrategy::OoStrategy(const errors::ErrorCatalog& catalog, ManagerKind kind) : catalog_(&catalog), kind_(kind) {
  if (kind == ManagerKind::Extended) {
    manager_ = std::make_unique<ExtendedErrorManager>(catalog);
  } else {
    manager_ = std::make_unique<ErrorManager>(catalog);
  }
  if (kind == ManagerKind::Noop) {
    null_sink_ = std::make_unique<NullErrorSink>();
    sink_ = null_sink_.get();
  } else {
    sink_ = manager_.get();
  }
}

void OoStrategy::bind(Module& root) {
  for (Module* m : preorder(root)) inject_sink(*m, *sink_);
}

modes::CommandResult OoStrategy::operator_override(ReactionCode code) {
  override_ = code;
  return {true, {}};
}

ReactionResult OoStrategy::react(Module& root, const ScanContext& ctx) {
  ReactionResult result;
  const auto fresh = manager_->published_since(watermark_);
  watermark_ = manager_->last_id();

  int best_rank = action_rank(LocalAction::Ignore);
  auto take_command = [&](LocalAction unit_action) {
    if (action_rank(unit_action) < best_rank) {
      best_rank = action_rank(unit_action);
      result.command = command_for(unit_action);
    }
  };

  if (!fresh.empty()) {
    std::optional<ReactionCode> chosen;
    bool critical = false;
    for (const auto& r : fresh) {
      const ReactionCode code = catalog_->reaction_for(r.event.number);
      if (code.is_none()) continue;
      if (!chosen || errors::reaction_priority(code) < errors::reaction_priority(*chosen)) chosen = code;
      if (errors::requires_reaction(r.event.severity)) critical = true;
    }
    DeliveryReport report{ctx.tick, chosen.value_or(ReactionCode::none()), "local", {}};
    for (Module* m : preorder(root)) {
      const LocalAction action = m == &root ? (chosen ? m->resolve_operator_code(*chosen) : LocalAction::Ignore)
                                            : decide_local_reaction(*m, *manager_);
      m->apply_reaction(action);
      report.deliveries.push_back({m->path(), action});
    }
    take_command(report.action_of(root.path()));
    if (chosen) audit_.push_back("local reactions for code " + std::to_string(chosen->value()));
    result.reports.push_back(std::move(report));
    if (chosen && critical) gate_.arm();
  }

  if (override_) {
    DeliveryReport report{ctx.tick, *override_, "operator", {}};
    for (Module* m : preorder(root)) {
      const LocalAction action = m->resolve_operator_code(*override_);
      m->apply_reaction(action);
      report.deliveries.push_back({m->path(), action});
    }
    take_command(report.action_of(root.path()));
    audit_.push_back("operator reaction code " + std::to_string(override_->value()));
    result.reports.push_back(std::move(report));
    override_.reset();
  }
  return result;
}

std::vector<std::string> OoStrategy::take_audit() {
  std::vector<std::string> out = std::move(audit_);
  audit_.clear();
  for (auto& l : manager_->take_audit()) out.push_back(std::move(l));
  return out;
}

}  // namespace plcsim::oo
