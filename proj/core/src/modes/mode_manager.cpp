#include "plcsim/modes/mode_manager.hpp"

namespace plcsim::modes {

std::string_view to_string(OperatingMode m) {
  switch (m) {
    case OperatingMode::Automatic: return "AUTOMATIC";
    case OperatingMode::Manual: return "MANUAL";
    case OperatingMode::Jog: return "JOG";
  }
  return "AUTOMATIC";
}

std::optional<OperatingMode> parse_operating_mode(std::string_view text) {
  for (auto m : {OperatingMode::Automatic, OperatingMode::Manual, OperatingMode::Jog}) {
    if (to_string(m) == text) return m;
  }
  // accept the capitalized spelling used in scenario files
  if (text == "Automatic") return OperatingMode::Automatic;
  if (text == "Manual") return OperatingMode::Manual;
  if (text == "Jog") return OperatingMode::Jog;
  return std::nullopt;
}

bool mode_change_permitted(MachineState s) {
  return s == MachineState::STOPPED || s == MachineState::ABORTED || s == MachineState::IDLE ||
         s == MachineState::HELD;
}

ModeDecision check_mode_request(OperatingMode current, OperatingMode requested, const ModeGateInputs& in) {
  ModeDecision d{requested, false, {}};
  if (requested == current) {
    d.accepted = true;
    return d;
  }
  if (!mode_change_permitted(in.state)) {
    d.reason = "state";
    return d;
  }
  if (requested == OperatingMode::Automatic) {
    if (in.open_error) {
      d.reason = "open error";
      return d;
    }
    if (in.recovery_blocked) {
      d.reason = "recovery pending";
      return d;
    }
    if (!in.axes_within_limits || in.faults_active) {
      d.reason = "interlock";
      return d;
    }
  }
  d.accepted = true;
  return d;
}

std::optional<ModeDecision> ModeManager::resolve(const ModeGateInputs& in) {
  if (!pending_) return std::nullopt;
  auto decision = check_mode_request(current_, *pending_, in);
  if (decision.accepted) current_ = *pending_;
  pending_.reset();
  return decision;
}

}  // namespace plcsim::modes
