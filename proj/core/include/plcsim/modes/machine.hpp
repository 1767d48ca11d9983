#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace plcsim::modes {

/// PackML machine states.
enum class MachineState {
  STOPPED,
  RESETTING,
  IDLE,
  STARTING,
  EXECUTE,
  COMPLETING,
  COMPLETE,
  HOLDING,
  HELD,
  UNHOLDING,
  SUSPENDING,
  SUSPENDED,
  UNSUSPENDING,
  STOPPING,
  ABORTING,
  ABORTED,
  CLEARING,
};

inline constexpr std::array<MachineState, 17> kAllStates{
    MachineState::STOPPED,    MachineState::RESETTING,  MachineState::IDLE,         MachineState::STARTING,
    MachineState::EXECUTE,    MachineState::COMPLETING, MachineState::COMPLETE,     MachineState::HOLDING,
    MachineState::HELD,       MachineState::UNHOLDING,  MachineState::SUSPENDING,   MachineState::SUSPENDED,
    MachineState::UNSUSPENDING, MachineState::STOPPING, MachineState::ABORTING,     MachineState::ABORTED,
    MachineState::CLEARING,
};

enum class StateCommand { Start, Stop, Abort, Clear, Reset, Hold, Unhold, Suspend, Unsuspend, Complete };

inline constexpr std::array<StateCommand, 10> kAllCommands{
    StateCommand::Start, StateCommand::Stop,    StateCommand::Abort,     StateCommand::Clear,
    StateCommand::Reset, StateCommand::Hold,    StateCommand::Unhold,    StateCommand::Suspend,
    StateCommand::Unsuspend, StateCommand::Complete,
};

std::string_view to_string(MachineState s);
std::optional<MachineState> parse_machine_state(std::string_view text);
std::string_view to_string(StateCommand c);
std::optional<StateCommand> parse_state_command(std::string_view text);

/// Acting ("-ING") states complete on their own once every module reports done.
bool is_acting(MachineState s);
/// The state an acting state settles into.
MachineState completion_of(MachineState acting);

/// Target acting state of the edge (state, cmd), if the edge exists.
std::optional<MachineState> transition(MachineState from, StateCommand cmd);

struct CommandResult {
  bool accepted = false;
  std::string reason;
};

/// Per-scan completion reports for acting states, one flag per equipment module.
struct PartReports {
  /// The state the reports were produced under; stale reports never complete a state.
  MachineState produced_in = MachineState::STOPPED;
  bool all_done = true;
};

class StateMachine {
 public:
  StateMachine() = default;
  explicit StateMachine(MachineState initial) : state_(initial) {}

  [[nodiscard]] MachineState state() const { return state_; }
  [[nodiscard]] std::int64_t entered_tick() const { return entered_tick_; }

  /// Enters the acting state of (state, cmd) or rejects with a reason.
  CommandResult command(StateCommand cmd, std::int64_t tick);

  /// Called once per scan. Acting states settle when the module reports that
  /// were produced in this same state all say done.
  MachineState tick(const PartReports& reports, std::int64_t tick);

 private:
  MachineState state_ = MachineState::STOPPED;
  std::int64_t entered_tick_ = 0;
};

}  // namespace plcsim::modes
