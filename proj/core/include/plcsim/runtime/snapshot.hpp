#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "plcsim/actuators/axis_config.hpp"
#include "plcsim/errors/error_event.hpp"
#include "plcsim/errors/reaction.hpp"
#include "plcsim/modes/machine.hpp"
#include "plcsim/modes/mode_manager.hpp"
#include "plcsim/plant/workpiece.hpp"
#include "plcsim/runtime/command.hpp"
#include "plcsim/runtime/io_image.hpp"
#include "plcsim/runtime/module_path.hpp"

namespace plcsim {

enum class ModuleLevel { Unit, EquipmentModule, ControlModule };
std::string_view to_string(ModuleLevel level);

struct ModuleStatus {
  bool has_error = false;
  std::optional<int> last_error_number;
  bool motion_active = false;

  bool operator==(const ModuleStatus&) const = default;
};

using SignalValue = std::variant<bool, double, std::string>;

struct AxisView {
  actuators::AxisConfig config;
  double reference_position = 0.0;
  double actual_position = 0.0;
  std::string state;

  bool operator==(const AxisView&) const = default;
};

struct ModuleSnapshot {
  ModulePath path;
  ModuleLevel level = ModuleLevel::ControlModule;
  std::string kind;
  ModuleStatus status;
  /// Latched local reaction.
  errors::LocalAction reaction = errors::LocalAction::Ignore;
  /// How the module reports errors: "FC_SetException" or "ErrorSink".
  std::string reporting;
  /// Local signal name -> value, e.g. "DO_Extend" -> true, "Status" -> "Extended".
  std::map<std::string, SignalValue> signals;
  std::optional<AxisView> axis;

  bool operator==(const ModuleSnapshot&) const = default;
};

/// Immutable picture of one completed scan. Safe to share across threads.
struct Snapshot {
  std::int64_t tick = 0;
  modes::MachineState machine_state = modes::MachineState::STOPPED;
  modes::OperatingMode mode = modes::OperatingMode::Automatic;
  std::vector<ModuleSnapshot> modules;
  IoImage io;
  std::vector<errors::ErrorRecord> errors;
  plant::PlantView plant;
  std::vector<std::string> audit;
  /// Commands applied in this scan.
  std::vector<CommandOutcome> commands;
  std::string strategy;

  [[nodiscard]] const ModuleSnapshot* module(const ModulePath& path) const;

  bool operator==(const Snapshot&) const = default;
};

}  // namespace plcsim
