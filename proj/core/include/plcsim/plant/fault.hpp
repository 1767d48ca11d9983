#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "plcsim/runtime/module_path.hpp"

namespace plcsim::plant {

enum class FaultKind { JammedWorkPiece, WpLostFromBelt, GripperSensorFail, MotorJam, DragDisturbance };

std::string_view to_string(FaultKind k);
std::optional<FaultKind> parse_fault_kind(std::string_view text);

/// Physical misbehavior injected into the plant.
///   JammedWorkPiece   target = cylinder path
///   WpLostFromBelt    wp_id
///   GripperSensorFail target = gripper path (defaults to <unit>/Crane/Gripper)
///   MotorJam          target = axis path
///   DragDisturbance   target = axis path, magnitude = speed loss per tick
struct FaultSpec {
  std::string id;
  FaultKind kind = FaultKind::JammedWorkPiece;
  std::optional<ModulePath> target;
  std::optional<int> wp_id;
  double magnitude = 0.0;
  std::int64_t active_from = 0;
  std::optional<std::int64_t> active_until;

  [[nodiscard]] bool active_at(std::int64_t tick) const {
    return tick >= active_from && (!active_until || tick < *active_until);
  }
  /// Key used for overlap detection: the target path or "wp:<id>".
  [[nodiscard]] std::string target_key() const;

  /// Throws std::invalid_argument.
  static FaultSpec from_json(const nlohmann::json& j);
  [[nodiscard]] nlohmann::json to_json() const;

  bool operator==(const FaultSpec&) const = default;
};

}  // namespace plcsim::plant
