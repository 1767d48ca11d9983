#include "plcsim/modes/machine.hpp"

namespace plcsim::modes {

std::string_view to_string(MachineState s) {
  switch (s) {
    case MachineState::STOPPED: return "STOPPED";
    case MachineState::RESETTING: return "RESETTING";
    case MachineState::IDLE: return "IDLE";
    case MachineState::STARTING: return "STARTING";
    case MachineState::EXECUTE: return "EXECUTE";
    case MachineState::COMPLETING: return "COMPLETING";
    case MachineState::COMPLETE: return "COMPLETE";
    case MachineState::HOLDING: return "HOLDING";
    case MachineState::HELD: return "HELD";
    case MachineState::UNHOLDING: return "UNHOLDING";
    case MachineState::SUSPENDING: return "SUSPENDING";
    case MachineState::SUSPENDED: return "SUSPENDED";
    case MachineState::UNSUSPENDING: return "UNSUSPENDING";
    case MachineState::STOPPING: return "STOPPING";
    case MachineState::ABORTING: return "ABORTING";
    case MachineState::ABORTED: return "ABORTED";
    case MachineState::CLEARING: return "CLEARING";
  }
  return "STOPPED";
}

std::optional<MachineState> parse_machine_state(std::string_view text) {
  for (auto s : kAllStates) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::string_view to_string(StateCommand c) {
  switch (c) {
    case StateCommand::Start: return "Start";
    case StateCommand::Stop: return "Stop";
    case StateCommand::Abort: return "Abort";
    case StateCommand::Clear: return "Clear";
    case StateCommand::Reset: return "Reset";
    case StateCommand::Hold: return "Hold";
    case StateCommand::Unhold: return "Unhold";
    case StateCommand::Suspend: return "Suspend";
    case StateCommand::Unsuspend: return "Unsuspend";
    case StateCommand::Complete: return "Complete";
  }
  return "Stop";
}

std::optional<StateCommand> parse_state_command(std::string_view text) {
  for (auto c : kAllCommands) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

bool is_acting(MachineState s) {
  switch (s) {
    case MachineState::RESETTING:
    case MachineState::STARTING:
    case MachineState::COMPLETING:
    case MachineState::HOLDING:
    case MachineState::UNHOLDING:
    case MachineState::SUSPENDING:
    case MachineState::UNSUSPENDING:
    case MachineState::STOPPING:
    case MachineState::ABORTING:
    case MachineState::CLEARING: return true;
    default: return false;
  }
}

MachineState completion_of(MachineState acting) {
  switch (acting) {
    case MachineState::RESETTING: return MachineState::IDLE;
    case MachineState::STARTING: return MachineState::EXECUTE;
    case MachineState::COMPLETING: return MachineState::COMPLETE;
    case MachineState::HOLDING: return MachineState::HELD;
    case MachineState::UNHOLDING: return MachineState::EXECUTE;
    case MachineState::SUSPENDING: return MachineState::SUSPENDED;
    case MachineState::UNSUSPENDING: return MachineState::EXECUTE;
    case MachineState::STOPPING: return MachineState::STOPPED;
    case MachineState::ABORTING: return MachineState::ABORTED;
    case MachineState::CLEARING: return MachineState::STOPPED;
    default: return acting;
  }
}

std::optional<MachineState> transition(MachineState from, StateCommand cmd) {
  using S = MachineState;
  switch (cmd) {
    case StateCommand::Abort:
      if (from == S::ABORTING || from == S::ABORTED || from == S::CLEARING) return std::nullopt;
      return S::ABORTING;
    case StateCommand::Stop:
      if (from == S::STOPPED || from == S::STOPPING || from == S::ABORTING || from == S::ABORTED ||
          from == S::CLEARING) {
        return std::nullopt;
      }
      return S::STOPPING;
    case StateCommand::Clear:
      if (from == S::ABORTED) return S::CLEARING;
      return std::nullopt;
    case StateCommand::Reset:
      if (from == S::STOPPED || from == S::COMPLETE) return S::RESETTING;
      return std::nullopt;
    case StateCommand::Start:
      if (from == S::IDLE) return S::STARTING;
      return std::nullopt;
    case StateCommand::Hold:
      if (from == S::EXECUTE) return S::HOLDING;
      return std::nullopt;
    case StateCommand::Unhold:
      if (from == S::HELD) return S::UNHOLDING;
      return std::nullopt;
    case StateCommand::Suspend:
      if (from == S::EXECUTE) return S::SUSPENDING;
      return std::nullopt;
    case StateCommand::Unsuspend:
      if (from == S::SUSPENDED) return S::UNSUSPENDING;
      return std::nullopt;
    case StateCommand::Complete:
      if (from == S::EXECUTE) return S::COMPLETING;
      return std::nullopt;
  }
  return std::nullopt;
}

CommandResult StateMachine::command(StateCommand cmd, std::int64_t tick) {
  auto next = transition(state_, cmd);
  if (!next) {
    return {false, std::string("illegal transition: ") + std::string(to_string(cmd)) + " in " +
                       std::string(to_string(state_))};
  }
  state_ = *next;
  entered_tick_ = tick;
  return {true, {}};
}

MachineState StateMachine::tick(const PartReports& reports, std::int64_t tick) {
  if (is_acting(state_) && reports.produced_in == state_ && reports.all_done) {
    state_ = completion_of(state_);
    entered_tick_ = tick;
  }
  return state_;
}

}  // namespace plcsim::modes
