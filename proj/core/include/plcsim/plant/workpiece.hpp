#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace plcsim::plant {

enum class Material { Metal, Plastic };
enum class Color { Black, White, Metallic };

enum class LocationKind { Stack, StackPickup, CraneGripper, Stamp, Belt, Ramp, Dropped };

std::string_view to_string(Material m);
std::optional<Material> parse_material(std::string_view text);
std::string_view to_string(Color c);
std::optional<Color> parse_color(std::string_view text);
std::string_view to_string(LocationKind k);
std::optional<LocationKind> parse_location_kind(std::string_view text);

struct Location {
  LocationKind kind = LocationKind::Stack;
  /// Position along the belt, valid for LocationKind::Belt.
  double belt_position = 0.0;
  /// Ramp index, valid for LocationKind::Ramp.
  int ramp = 0;

  bool operator==(const Location&) const = default;
};

struct WorkPiece {
  int id = 0;
  Material material = Material::Plastic;
  Color color = Color::White;
  Location location;
  bool stamped = false;
  bool visited_stamp = false;

  bool operator==(const WorkPiece&) const = default;
};

/// Immutable view of the simulated plant carried inside snapshots.
struct PlantView {
  std::vector<WorkPiece> workpieces;
  /// Cylinder stroke position in ticks of travel, keyed by module path.
  std::map<std::string, double> cylinders;
  /// Actual axis position, keyed by module path.
  std::map<std::string, double> axes;
  bool vacuum_holding = false;
  bool estop_pressed = false;
  std::vector<std::string> active_faults;

  bool operator==(const PlantView&) const = default;
};

}  // namespace plcsim::plant
