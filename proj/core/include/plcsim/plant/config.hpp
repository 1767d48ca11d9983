#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "plcsim/actuators/axis_config.hpp"
#include "plcsim/errors/reaction.hpp"
#include "plcsim/plant/workpiece.hpp"

namespace plcsim::plant {

struct WorkPieceSpec {
  int id = 0;
  Material material = Material::Plastic;
  Color color = Color::White;

  bool operator==(const WorkPieceSpec&) const = default;
};

/// Everything needed to build the xPPU: hierarchy selection, kinematics,
/// recipe and module-owned application reactions. Cylinder kinds stay text
/// until the runtime is built so an unknown kind is reported as a build error.
struct PlantConfig {
  std::string unit_name = "xPPU";
  /// Equipment modules to instantiate, in evaluation order.
  std::vector<std::string> equipment{"Stack", "Crane", "Stamp", "SortingConveyor"};

  int stack_capacity = 8;
  std::vector<WorkPieceSpec> recipe{
      {1, Material::Plastic, Color::White}, {2, Material::Plastic, Color::Black},
      {3, Material::Metal, Color::Metallic}, {4, Material::Plastic, Color::White},
      {5, Material::Plastic, Color::Black}, {6, Material::Metal, Color::Metallic},
  };

  double belt_length = 100.0;
  std::vector<double> separator_positions{40.0, 70.0};
  double sensor_position = 10.0;
  double sensor_window = 1.0;
  /// Color -> ramp index; separator i feeds ramp i, the last ramp sits at the belt end.
  std::map<Color, int> ramp_for_color{{Color::White, 0}, {Color::Black, 1}, {Color::Metallic, 2}};

  actuators::AxisConfig crane_axis{actuators::MotionKind::Rotary, actuators::AxisLimits{0.0, 360.0},
                                   actuators::FeedbackKind::AbsoluteEncoder, 5.0, 10.0, 5};
  actuators::AxisConfig belt_axis{actuators::MotionKind::Linear, std::nullopt,
                                  actuators::FeedbackKind::IncrementalEncoder, 2.0, 10.0, 5};
  double stack_angle = 0.0;
  double stamp_angle = 90.0;
  double belt_angle = 180.0;

  /// Relative module path -> "Monostable" | "Bistable".
  std::map<std::string, std::string> cylinder_kinds{
      {"Stack/Pusher", "Bistable"},
      {"Crane/Lift", "Monostable"},
      {"Stamp/Press", "Bistable"},
      {"SortingConveyor/Separator1", "Monostable"},
      {"SortingConveyor/Separator2", "Monostable"},
  };
  int travel_ticks = 8;
  int timeout_ticks = 24;
  int stamp_cycle_ticks = 12;
  int grip_dwell_ticks = 2;
  int watchdog_margin_ticks = 10;

  /// Equipment module name -> application-specific reaction code -> local action.
  std::map<std::string, std::map<int, errors::LocalAction>> application_reactions{
      {"SortingConveyor", {{32, errors::LocalAction::StopEndOfCycle}}},
  };

  /// Ticks after handoff within which the belt sensor must see the work piece.
  [[nodiscard]] int belt_watchdog_ticks() const;
  [[nodiscard]] int ramp_count() const { return static_cast<int>(separator_positions.size()) + 1; }
  [[nodiscard]] bool has_equipment(const std::string& name) const;

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;

  /// Applies the keys present in `j` on top of `base`. Throws std::invalid_argument.
  static PlantConfig from_json(const nlohmann::json& j, PlantConfig base);
  static PlantConfig from_json(const nlohmann::json& j);
  [[nodiscard]] nlohmann::json to_json() const;

  bool operator==(const PlantConfig&) const = default;
};

}  // namespace plcsim::plant
