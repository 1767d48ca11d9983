#include "plcsim/plant/plant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace plcsim::plant {

using actuators::CylinderKind;

Plant::Plant(const PlantConfig& config, const std::map<std::string, CylinderKind>& cylinder_kinds)
    : config_(config), unit_(config.unit_name) {
  for (const auto& [path, kind] : cylinder_kinds) cylinders_[path] = Cylinder{kind, 0};
  for (const auto& em : config_.equipment) equipment_paths_.insert(unit_ + "/" + em);
  if (config_.has_equipment("Crane")) {
    axes_[unit_ + "/Crane/Base"] = Axis{config_.crane_axis, config_.stack_angle};
    grippers_.insert(unit_ + "/Crane/Gripper");
  }
  if (config_.has_equipment("SortingConveyor")) axes_[unit_ + "/SortingConveyor/Belt"] = Axis{config_.belt_axis, 0.0};
  for (const auto& spec : config_.recipe) {
    wps_.push_back(WorkPiece{spec.id, spec.material, spec.color, Location{LocationKind::Stack, 0.0, 0}, false, false});
    stack_.push_back(spec.id);
  }
}

std::string Plant::unit_sensor(std::string_view name) const { return signal_name(ModulePath::parse(unit_), name); }

std::string Plant::em_sensor(std::string_view em, std::string_view name) const {
  return unit_ + "/" + std::string(em) + "." + std::string(name);
}

bool Plant::has_path(const ModulePath& p) const {
  const std::string s = p.str();
  return s == unit_ || equipment_paths_.count(s) || cylinders_.count(s) || axes_.count(s) || grippers_.count(s);
}

const FaultSpec* Plant::active_fault(FaultKind kind, const std::string& key, std::int64_t tick) const {
  for (const auto& [id, f] : faults_) {
    if (f.kind == kind && f.target_key() == key && f.active_at(tick)) return &f;
  }
  return nullptr;
}

WorkPiece* Plant::wp_at(LocationKind kind) {
  for (auto& w : wps_) {
    if (w.location.kind == kind) return &w;
  }
  return nullptr;
}

const WorkPiece* Plant::wp_at(LocationKind kind) const {
  for (const auto& w : wps_) {
    if (w.location.kind == kind) return &w;
  }
  return nullptr;
}

std::optional<double> Plant::station_at(double angle) const {
  for (double s : {config_.stack_angle, config_.stamp_angle, config_.belt_angle}) {
    if (std::abs(angle - s) <= 0.5) return s;
  }
  return std::nullopt;
}

bool Plant::cylinder_extended(const std::string& path) const {
  auto it = cylinders_.find(path);
  return it != cylinders_.end() && it->second.stroke >= config_.travel_ticks;
}

bool Plant::out(const IoImage& io, const std::string& name) const { return !estop_ && io.dout(name); }

void Plant::latch_inputs(IoImage& io, std::int64_t tick) const {
  for (const auto& [path, c] : cylinders_) {
    io.digital_inputs[path + ".DI_Extended"] = c.stroke >= config_.travel_ticks;
    io.digital_inputs[path + ".DI_Retracted"] = c.stroke <= 0;
  }
  for (const auto& [path, a] : axes_) {
    io.analog_inputs[path + ".FeedbackRaw"] = actuators::encode_feedback(a.config.feedback, a.actual);
  }
  for (const auto& path : grippers_) {
    io.digital_inputs[path + ".DI_Product"] =
        held_.has_value() && active_fault(FaultKind::GripperSensorFail, path, tick) == nullptr;
  }
  if (config_.has_equipment("Stack")) {
    const WorkPiece* pick = wp_at(LocationKind::StackPickup);
    io.digital_inputs[em_sensor("Stack", "DI_WpAtPickup")] = pick != nullptr;
    io.digital_inputs[em_sensor("Stack", "DI_StackFilled")] = !stack_.empty();
    io.digital_inputs[em_sensor("Stack", "DI_Metal")] = pick && pick->material == Material::Metal;
    io.digital_inputs[em_sensor("Stack", "DI_White")] = pick && pick->color == Color::White;
  }
  if (config_.has_equipment("Stamp")) {
    io.digital_inputs[em_sensor("Stamp", "DI_WpAtStamp")] = wp_at(LocationKind::Stamp) != nullptr;
  }
  if (config_.has_equipment("SortingConveyor")) {
    bool seen = false;
    for (const auto& w : wps_) {
      if (w.location.kind == LocationKind::Belt &&
          std::abs(w.location.belt_position - config_.sensor_position) <= config_.sensor_window) {
        seen = true;
      }
    }
    io.digital_inputs[em_sensor("SortingConveyor", "DI_WpAtSensor")] = seen;
  }
  io.digital_inputs[unit_sensor("DI_EStop")] = estop_;
}

void Plant::step(const IoImage& io, std::int64_t tick) {
  const int travel = config_.travel_ticks;

  if (config_.has_equipment("Crane")) {
    const std::string lift = unit_ + "/Crane/Lift";
    const std::string grip = unit_ + "/Crane/Gripper";
    const bool lowered = cylinder_extended(lift);
    const auto station = station_at(axes_.at(unit_ + "/Crane/Base").actual);
    const bool vac = out(io, grip + ".DO_Vacuum");
    if (vac && !held_ && lowered && station) {
      WorkPiece* w = nullptr;
      if (*station == config_.stack_angle) {
        w = wp_at(LocationKind::StackPickup);
      } else if (*station == config_.stamp_angle) {
        w = wp_at(LocationKind::Stamp);
      } else {
        for (auto& b : wps_) {
          if (b.location.kind == LocationKind::Belt && b.location.belt_position <= config_.sensor_window) w = &b;
        }
      }
      if (w) {
        held_ = w->id;
        w->location = Location{LocationKind::CraneGripper, 0.0, 0};
      }
    } else if (!vac && held_) {
      auto& w = *std::find_if(wps_.begin(), wps_.end(), [&](const WorkPiece& x) { return x.id == *held_; });
      if (lowered && station && *station == config_.stack_angle && !wp_at(LocationKind::StackPickup)) {
        w.location = Location{LocationKind::StackPickup, 0.0, 0};
      } else if (lowered && station && *station == config_.stamp_angle && !wp_at(LocationKind::Stamp)) {
        w.location = Location{LocationKind::Stamp, 0.0, 0};
        w.visited_stamp = true;
      } else if (lowered && station && *station == config_.belt_angle) {
        w.location = Location{LocationKind::Belt, 0.0, 0};
      } else {
        w.location = Location{LocationKind::Dropped, 0.0, 0};
      }
      held_.reset();
    }
  }

  const std::string pusher = unit_ + "/Stack/Pusher";
  const std::string press = unit_ + "/Stamp/Press";
  const bool pusher_was_out = cylinder_extended(pusher);
  const bool press_was_out = cylinder_extended(press);
  for (auto& [path, c] : cylinders_) {
    if (active_fault(FaultKind::JammedWorkPiece, path, tick)) continue;
    const bool ext = out(io, path + ".DO_Extend");
    int delta = 0;
    if (c.kind == CylinderKind::Monostable) {
      delta = ext ? 1 : -1;
    } else {
      const bool ret = out(io, path + ".DO_Retract");
      delta = ext == ret ? 0 : (ext ? 1 : -1);
    }
    c.stroke = std::clamp(c.stroke + delta, 0, travel);
  }

  const std::string belt = unit_ + "/SortingConveyor/Belt";
  const double belt_before = axes_.count(belt) ? axes_.at(belt).actual : 0.0;
  for (auto& [path, a] : axes_) {
    if (!out(io, path + ".DO_Enable")) continue;
    double speed = a.config.max_speed;
    if (active_fault(FaultKind::MotorJam, path, tick)) speed = 0.0;
    if (const auto* d = active_fault(FaultKind::DragDisturbance, path, tick)) speed = std::max(0.0, speed - d->magnitude);
    const double ref = io.ao(path + ".ReferencePosition");
    a.actual += std::clamp(ref - a.actual, -speed, speed);
  }

  if (axes_.count(belt)) {
    const double delta = axes_.at(belt).actual - belt_before;
    for (auto& w : wps_) {
      if (w.location.kind != LocationKind::Belt) continue;
      if (active_fault(FaultKind::WpLostFromBelt, "wp:" + std::to_string(w.id), tick)) {
        w.location = Location{LocationKind::Dropped, 0.0, 0};
        continue;
      }
      const double prev = w.location.belt_position;
      const double pos = prev + delta;
      w.location.belt_position = pos;
      for (std::size_t i = 0; i < config_.separator_positions.size(); ++i) {
        const double sep = config_.separator_positions[i];
        const std::string cyl = unit_ + "/SortingConveyor/Separator" + std::to_string(i + 1);
        if (cylinder_extended(cyl) && prev <= sep && sep <= pos) {
          w.location = Location{LocationKind::Ramp, 0.0, static_cast<int>(i)};
          break;
        }
      }
      if (w.location.kind == LocationKind::Belt && pos >= config_.belt_length) {
        w.location = Location{LocationKind::Ramp, 0.0, config_.ramp_count() - 1};
      }
    }
  }

  if (!pusher_was_out && cylinder_extended(pusher) && !stack_.empty() && !wp_at(LocationKind::StackPickup)) {
    const int id = stack_.front();
    stack_.erase(stack_.begin());
    for (auto& w : wps_) {
      if (w.id == id) w.location = Location{LocationKind::StackPickup, 0.0, 0};
    }
  }
  if (!press_was_out && cylinder_extended(press)) {
    if (auto* w = wp_at(LocationKind::Stamp)) w->stamped = true;
  }
}

modes::CommandResult Plant::inject(const FaultSpec& in, std::int64_t /*tick*/) {
  FaultSpec spec = in;
  if (spec.id.empty()) return {false, "fault id must not be empty"};
  if (faults_.count(spec.id)) return {false, "duplicate fault id " + spec.id};
  switch (spec.kind) {
    case FaultKind::JammedWorkPiece:
      if (!spec.target || !cylinders_.count(spec.target->str())) {
        return {false, "unknown cylinder " + (spec.target ? spec.target->str() : std::string("<none>"))};
      }
      break;
    case FaultKind::MotorJam:
    case FaultKind::DragDisturbance:
      if (!spec.target || !axes_.count(spec.target->str())) {
        return {false, "unknown axis " + (spec.target ? spec.target->str() : std::string("<none>"))};
      }
      break;
    case FaultKind::GripperSensorFail:
      if (!spec.target) spec.target = ModulePath::parse(unit_ + "/Crane/Gripper");
      if (!grippers_.count(spec.target->str())) return {false, "unknown gripper " + spec.target->str()};
      break;
    case FaultKind::WpLostFromBelt: {
      const bool known = std::any_of(wps_.begin(), wps_.end(), [&](const WorkPiece& w) { return w.id == spec.wp_id; });
      if (!known) return {false, "unknown work piece " + std::to_string(spec.wp_id.value_or(-1))};
      break;
    }
  }
  for (const auto& [id, f] : faults_) {
    if (f.target_key() != spec.target_key()) continue;
    const auto end_a = f.active_until.value_or(std::numeric_limits<std::int64_t>::max());
    const auto end_b = spec.active_until.value_or(std::numeric_limits<std::int64_t>::max());
    if (f.active_from < end_b && spec.active_from < end_a) {
      return {false, "overlapping fault on " + spec.target_key() + " (" + id + ")"};
    }
  }
  faults_[spec.id] = spec;
  return {true, {}};
}

modes::CommandResult Plant::clear(const std::string& id) {
  if (!faults_.erase(id)) return {false, "unknown fault " + id};
  return {true, {}};
}

bool Plant::any_fault_active(std::int64_t tick) const {
  return std::any_of(faults_.begin(), faults_.end(), [&](const auto& kv) { return kv.second.active_at(tick); });
}

PlantView Plant::view(std::int64_t tick) const {
  PlantView v;
  v.workpieces = wps_;
  for (const auto& [path, c] : cylinders_) v.cylinders[path] = c.stroke;
  for (const auto& [path, a] : axes_) v.axes[path] = a.actual;
  v.vacuum_holding = held_.has_value();
  v.estop_pressed = estop_;
  for (const auto& [id, f] : faults_) {
    if (f.active_at(tick)) v.active_faults.push_back(id);
  }
  return v;
}

}  // namespace plcsim::plant
