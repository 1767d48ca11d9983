#include "plcsim/plant/config.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "plcsim/plant/fault.hpp"

namespace plcsim::plant {

using nlohmann::json;

std::string_view to_string(Material m) { return m == Material::Metal ? "Metal" : "Plastic"; }

std::optional<Material> parse_material(std::string_view text) {
  if (text == "Metal") return Material::Metal;
  if (text == "Plastic") return Material::Plastic;
  return std::nullopt;
}

std::string_view to_string(Color c) {
  switch (c) {
    case Color::Black: return "Black";
    case Color::White: return "White";
    case Color::Metallic: return "Metallic";
  }
  return "?";
}

std::optional<Color> parse_color(std::string_view text) {
  if (text == "Black") return Color::Black;
  if (text == "White") return Color::White;
  if (text == "Metallic") return Color::Metallic;
  return std::nullopt;
}

std::string_view to_string(LocationKind k) {
  switch (k) {
    case LocationKind::Stack: return "Stack";
    case LocationKind::StackPickup: return "StackPickup";
    case LocationKind::CraneGripper: return "CraneGripper";
    case LocationKind::Stamp: return "Stamp";
    case LocationKind::Belt: return "Belt";
    case LocationKind::Ramp: return "Ramp";
    case LocationKind::Dropped: return "Dropped";
  }
  return "?";
}

std::optional<LocationKind> parse_location_kind(std::string_view text) {
  for (auto k : {LocationKind::Stack, LocationKind::StackPickup, LocationKind::CraneGripper, LocationKind::Stamp,
                 LocationKind::Belt, LocationKind::Ramp, LocationKind::Dropped}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

int PlantConfig::belt_watchdog_ticks() const {
  return static_cast<int>(std::ceil(belt_length / belt_axis.max_speed)) + watchdog_margin_ticks;
}

bool PlantConfig::has_equipment(const std::string& name) const {
  for (const auto& e : equipment) {
    if (e == name) return true;
  }
  return false;
}

void PlantConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("plant config: " + msg); };
  if (unit_name.empty()) fail("unitName must not be empty");
  if (stack_capacity < 0) fail("stackCapacity must not be negative");
  if (static_cast<int>(recipe.size()) > stack_capacity) fail("recipe exceeds stackCapacity");
  std::set<int> ids;
  for (const auto& wp : recipe) {
    if (!ids.insert(wp.id).second) fail("duplicate work piece id " + std::to_string(wp.id));
    if ((wp.material == Material::Metal) != (wp.color == Color::Metallic)) {
      fail("work piece " + std::to_string(wp.id) + ": Metallic color iff Metal material");
    }
  }
  if (!(belt_length > 0.0)) fail("beltLength must be positive");
  double last = -1.0;
  for (double p : separator_positions) {
    if (!(p > last)) fail("separatorPositions must be strictly increasing");
    if (!(p < belt_length)) fail("separatorPositions must be < beltLength");
    last = p;
  }
  if (separator_positions.size() != 2) fail("the xPPU conveyor has exactly two separators");
  if (!(sensor_position >= 0.0) || (!separator_positions.empty() && !(sensor_position < separator_positions.front()))) {
    fail("sensorPosition must lie before the first separator");
  }
  for (const auto& [color, ramp] : ramp_for_color) {
    if (ramp < 0 || ramp >= ramp_count()) fail("ramp index out of range for " + std::string(to_string(color)));
  }
  for (auto c : {Color::White, Color::Black, Color::Metallic}) {
    if (!ramp_for_color.count(c)) fail("rampForColor misses " + std::string(to_string(c)));
  }
  try {
    crane_axis.validate();
    belt_axis.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (crane_axis.limits) {
    for (double a : {stack_angle, stamp_angle, belt_angle}) {
      if (a < crane_axis.limits->negative_limit || a > crane_axis.limits->positive_limit) {
        fail("station angle outside crane axis limits");
      }
    }
  }
  if (travel_ticks <= 0) fail("travelTicks must be positive");
  if (timeout_ticks <= travel_ticks) fail("timeoutTicks must exceed travelTicks");
  if (stamp_cycle_ticks <= 0 || grip_dwell_ticks <= 0 || watchdog_margin_ticks < 0) fail("tick parameters must be positive");
  for (const auto& [em, table] : application_reactions) {
    for (const auto& [code, action] : table) {
      if (code < 32 || code > 63) fail("application reaction codes must lie in 32..63");
      (void)action;
    }
    (void)em;
  }
}

namespace {

actuators::AxisConfig axis_from_json(const json& j, actuators::AxisConfig a) {
  for (const auto& [key, v] : j.items()) {
    if (key == "motion") {
      auto m = actuators::parse_motion_kind(v.get<std::string>());
      if (!m) throw std::invalid_argument("unknown axis motion " + v.dump());
      a.motion = *m;
    } else if (key == "range") {
      if (v.is_string() && v.get<std::string>() == "Unlimited") {
        a.limits.reset();
      } else if (v.is_object()) {
        a.limits = actuators::AxisLimits{v.at("negativeLimit").get<double>(), v.at("positiveLimit").get<double>()};
      } else {
        throw std::invalid_argument("axis range must be \"Unlimited\" or {negativeLimit, positiveLimit}");
      }
    } else if (key == "feedback") {
      auto f = actuators::parse_feedback_kind(v.get<std::string>());
      if (!f) throw std::invalid_argument("unknown axis feedback " + v.dump());
      a.feedback = *f;
    } else if (key == "maxSpeed") {
      a.max_speed = v.get<double>();
    } else if (key == "dragToleranceUnits") {
      a.drag_tolerance_units = v.get<double>();
    } else if (key == "dragToleranceTicks") {
      a.drag_tolerance_ticks = v.get<int>();
    } else {
      throw std::invalid_argument("unknown axis config key " + key);
    }
  }
  return a;
}

json axis_to_json(const actuators::AxisConfig& a) {
  json j = json::object();
  j["motion"] = actuators::to_string(a.motion);
  if (a.limits) {
    j["range"] = {{"negativeLimit", a.limits->negative_limit}, {"positiveLimit", a.limits->positive_limit}};
  } else {
    j["range"] = "Unlimited";
  }
  j["feedback"] = actuators::to_string(a.feedback);
  j["maxSpeed"] = a.max_speed;
  j["dragToleranceUnits"] = a.drag_tolerance_units;
  j["dragToleranceTicks"] = a.drag_tolerance_ticks;
  return j;
}

}  // namespace

PlantConfig PlantConfig::from_json(const json& j, PlantConfig c) {
  if (!j.is_object()) throw std::invalid_argument("plant config must be an object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "unitName") {
        c.unit_name = v.get<std::string>();
      } else if (key == "equipment") {
        c.equipment = v.get<std::vector<std::string>>();
      } else if (key == "stackCapacity") {
        c.stack_capacity = v.get<int>();
      } else if (key == "recipe") {
        c.recipe.clear();
        for (const auto& w : v) {
          WorkPieceSpec s;
          s.id = w.at("id").get<int>();
          auto m = parse_material(w.at("material").get<std::string>());
          auto col = parse_color(w.at("color").get<std::string>());
          if (!m || !col) throw std::invalid_argument("bad work piece " + w.dump());
          s.material = *m;
          s.color = *col;
          c.recipe.push_back(s);
        }
      } else if (key == "beltLength") {
        c.belt_length = v.get<double>();
      } else if (key == "separatorPositions") {
        c.separator_positions = v.get<std::vector<double>>();
      } else if (key == "sensorPosition") {
        c.sensor_position = v.get<double>();
      } else if (key == "sensorWindow") {
        c.sensor_window = v.get<double>();
      } else if (key == "rampForColor") {
        for (const auto& [name, ramp] : v.items()) {
          auto col = parse_color(name);
          if (!col) throw std::invalid_argument("unknown color " + name);
          c.ramp_for_color[*col] = ramp.get<int>();
        }
      } else if (key == "craneAxis") {
        c.crane_axis = axis_from_json(v, c.crane_axis);
      } else if (key == "beltAxis") {
        c.belt_axis = axis_from_json(v, c.belt_axis);
      } else if (key == "stackAngle") {
        c.stack_angle = v.get<double>();
      } else if (key == "stampAngle") {
        c.stamp_angle = v.get<double>();
      } else if (key == "beltAngle") {
        c.belt_angle = v.get<double>();
      } else if (key == "cylinderKinds") {
        for (const auto& [path, kind] : v.items()) c.cylinder_kinds[path] = kind.get<std::string>();
      } else if (key == "travelTicks") {
        c.travel_ticks = v.get<int>();
      } else if (key == "timeoutTicks") {
        c.timeout_ticks = v.get<int>();
      } else if (key == "stampCycleTicks") {
        c.stamp_cycle_ticks = v.get<int>();
      } else if (key == "gripDwellTicks") {
        c.grip_dwell_ticks = v.get<int>();
      } else if (key == "watchdogMarginTicks") {
        c.watchdog_margin_ticks = v.get<int>();
      } else if (key == "applicationReactions") {
        c.application_reactions.clear();
        for (const auto& [em, table] : v.items()) {
          auto& dst = c.application_reactions[em];
          for (const auto& [code, action] : table.items()) {
            auto a = errors::parse_local_action(action.get<std::string>());
            if (!a) throw std::invalid_argument("unknown local action " + action.dump());
            dst[std::stoi(code)] = *a;
          }
        }
      } else {
        throw std::invalid_argument("unknown plant config key " + key);
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("plant config: ") + e.what());
  }
  return c;
}

json PlantConfig::to_json() const {
  json j = json::object();
  j["unitName"] = unit_name;
  j["equipment"] = equipment;
  j["stackCapacity"] = stack_capacity;
  j["recipe"] = json::array();
  for (const auto& w : recipe) {
    j["recipe"].push_back({{"id", w.id}, {"material", to_string(w.material)}, {"color", to_string(w.color)}});
  }
  j["beltLength"] = belt_length;
  j["separatorPositions"] = separator_positions;
  j["sensorPosition"] = sensor_position;
  j["sensorWindow"] = sensor_window;
  j["rampForColor"] = json::object();
  for (const auto& [c, r] : ramp_for_color) j["rampForColor"][std::string(to_string(c))] = r;
  j["craneAxis"] = axis_to_json(crane_axis);
  j["beltAxis"] = axis_to_json(belt_axis);
  j["stackAngle"] = stack_angle;
  j["stampAngle"] = stamp_angle;
  j["beltAngle"] = belt_angle;
  j["cylinderKinds"] = cylinder_kinds;
  j["travelTicks"] = travel_ticks;
  j["timeoutTicks"] = timeout_ticks;
  j["stampCycleTicks"] = stamp_cycle_ticks;
  j["gripDwellTicks"] = grip_dwell_ticks;
  j["watchdogMarginTicks"] = watchdog_margin_ticks;
  j["applicationReactions"] = json::object();
  for (const auto& [em, table] : application_reactions) {
    json t = json::object();
    for (const auto& [code, a] : table) t[std::to_string(code)] = errors::to_string(a);
    j["applicationReactions"][em] = t;
  }
  return j;
}

std::string_view to_string(FaultKind k) {
  switch (k) {
    case FaultKind::JammedWorkPiece: return "JammedWorkPiece";
    case FaultKind::WpLostFromBelt: return "WpLostFromBelt";
    case FaultKind::GripperSensorFail: return "GripperSensorFail";
    case FaultKind::MotorJam: return "MotorJam";
    case FaultKind::DragDisturbance: return "DragDisturbance";
  }
  return "?";
}

std::optional<FaultKind> parse_fault_kind(std::string_view text) {
  for (auto k : {FaultKind::JammedWorkPiece, FaultKind::WpLostFromBelt, FaultKind::GripperSensorFail,
                 FaultKind::MotorJam, FaultKind::DragDisturbance}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::string FaultSpec::target_key() const {
  if (kind == FaultKind::WpLostFromBelt) return "wp:" + std::to_string(wp_id.value_or(-1));
  return target ? target->str() : std::string(to_string(kind));
}

FaultSpec FaultSpec::from_json(const json& j) {
  try {
    FaultSpec f;
    f.id = j.at("id").get<std::string>();
    auto k = parse_fault_kind(j.at("kind").get<std::string>());
    if (!k) throw std::invalid_argument("unknown fault kind " + j.at("kind").dump());
    f.kind = *k;
    if (j.contains("target")) f.target = ModulePath::parse(j.at("target").get<std::string>());
    if (j.contains("wpId")) f.wp_id = j.at("wpId").get<int>();
    if (j.contains("magnitude")) f.magnitude = j.at("magnitude").get<double>();
    if (j.contains("activeFrom")) f.active_from = j.at("activeFrom").get<std::int64_t>();
    if (j.contains("activeUntil") && !j.at("activeUntil").is_null()) f.active_until = j.at("activeUntil").get<std::int64_t>();
    for (const auto& [key, v] : j.items()) {
      static const std::set<std::string> known{"id", "kind", "target", "wpId", "magnitude", "activeFrom", "activeUntil"};
      if (!known.count(key)) throw std::invalid_argument("unknown fault key " + key);
      (void)v;
    }
    switch (f.kind) {
      case FaultKind::WpLostFromBelt:
        if (!f.wp_id) throw std::invalid_argument("WpLostFromBelt requires wpId");
        break;
      case FaultKind::GripperSensorFail:
        break;
      case FaultKind::DragDisturbance:
        if (!(f.magnitude > 0.0)) throw std::invalid_argument("DragDisturbance requires a positive magnitude");
        [[fallthrough]];
      case FaultKind::JammedWorkPiece:
      case FaultKind::MotorJam:
        if (!f.target) throw std::invalid_argument(std::string(to_string(f.kind)) + " requires target");
        break;
    }
    if (f.active_until && *f.active_until <= f.active_from) throw std::invalid_argument("activeUntil must exceed activeFrom");
    return f;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("fault spec: ") + e.what());
  }
}

json FaultSpec::to_json() const {
  json j = json::object();
  j["id"] = id;
  j["kind"] = to_string(kind);
  if (target) j["target"] = target->str();
  if (wp_id) j["wpId"] = *wp_id;
  if (kind == FaultKind::DragDisturbance) j["magnitude"] = magnitude;
  j["activeFrom"] = active_from;
  if (active_until) j["activeUntil"] = *active_until;
  return j;
}

PlantConfig PlantConfig::from_json(const json& j) { return from_json(j, PlantConfig{}); }

}  // namespace plcsim::plant
