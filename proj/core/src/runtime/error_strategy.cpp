#include "plcsim/runtime/error_strategy.hpp"

namespace plcsim {

using errors::LocalAction;
using modes::MachineState;
using modes::OperatingMode;
using modes::StateCommand;

LocalAction DeliveryReport::action_of(const ModulePath& path) const {
  for (const auto& d : deliveries) {
    if (d.path == path) return d.action;
  }
  return LocalAction::Ignore;
}

std::optional<StateCommand> command_for(LocalAction action) {
  switch (action) {
    case LocalAction::AbortNow: return StateCommand::Abort;
    case LocalAction::StopEndOfCycle: return StateCommand::Stop;
    case LocalAction::Hold: return StateCommand::Hold;
    case LocalAction::Suspend: return StateCommand::Suspend;
    case LocalAction::FinishCycle: return StateCommand::Complete;
    case LocalAction::Ignore: return std::nullopt;
  }
  return std::nullopt;
}

void RecoveryGate::arm() {
  pending_ = true;
  visited_manual_ = false;
  cleared_ = false;
}

void RecoveryGate::observe(MachineState s, OperatingMode m) {
  if (!pending_) return;
  if (m == OperatingMode::Manual || m == OperatingMode::Jog) visited_manual_ = true;
  if (s == MachineState::CLEARING || s == MachineState::RESETTING) cleared_ = true;
}

GateDecision RecoveryGate::check(const std::vector<errors::ErrorRecord>& records) const {
  if (!pending_) return {};
  for (const auto& r : records) {
    if (r.state == errors::RecordState::Active && errors::requires_reaction(r.event.severity)) {
      return {false, "unacknowledged " + std::string(errors::to_string(r.event.severity)) + " " +
                         std::to_string(r.event.number)};
    }
  }
  if (!visited_manual_) return {false, "manual or jog mode not visited since the reaction"};
  if (!cleared_) return {false, "machine not cleared or reset since the reaction"};
  return {};
}

}  // namespace plcsim
