#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "plcsim/modes/machine.hpp"

namespace plcsim::modes {

enum class OperatingMode { Automatic, Manual, Jog };

std::string_view to_string(OperatingMode m);
std::optional<OperatingMode> parse_operating_mode(std::string_view text);

/// Mode changes are only permitted in STOPPED, ABORTED, IDLE and HELD.
bool mode_change_permitted(MachineState s);

/// Everything the mode manager needs to judge a request, gathered by the runtime.
struct ModeGateInputs {
  MachineState state = MachineState::STOPPED;
  /// Any record that is still unacknowledged, regardless of severity.
  bool open_error = false;
  /// The error strategy's recovery gate; empty reason when open.
  bool recovery_blocked = false;
  std::string recovery_reason;
  bool axes_within_limits = true;
  bool faults_active = false;
};

struct ModeDecision {
  OperatingMode requested = OperatingMode::Automatic;
  bool accepted = false;
  /// "state", "open error", "recovery pending" or "interlock" when rejected.
  std::string reason;
};

/// Pure admission check. Switching into Automatic additionally requires an
/// open recovery gate and correctly parameterized interlocks (no open errors,
/// axes inside their limits, no injected faults).
ModeDecision check_mode_request(OperatingMode current, OperatingMode requested, const ModeGateInputs& in);

/// Holds the current mode and at most one pending request, which is resolved
/// (applied or rejected) in the next mode-manager phase.
class ModeManager {
 public:
  [[nodiscard]] OperatingMode current() const { return current_; }
  [[nodiscard]] std::optional<OperatingMode> pending() const { return pending_; }

  void request(OperatingMode mode) { pending_ = mode; }
  std::optional<ModeDecision> resolve(const ModeGateInputs& in);

 private:
  OperatingMode current_ = OperatingMode::Automatic;
  std::optional<OperatingMode> pending_;
};

}  // namespace plcsim::modes
