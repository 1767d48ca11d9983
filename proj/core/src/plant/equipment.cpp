#include "plcsim/plant/equipment.hpp"

#include <cmath>

namespace plcsim::plant {

using modes::MachineState;

EquipmentModule::EquipmentModule(ModulePath path, std::string kind)
    : Module(std::move(path), ModuleLevel::EquipmentModule, std::move(kind)) {}

JobOutcome EquipmentModule::take_outcome() {
  auto out = outcome_;
  outcome_ = JobOutcome::None;
  return out;
}

bool EquipmentModule::start_job(std::string name, std::int64_t tick) {
  if (!accepting()) return false;
  job_ = std::move(name);
  job_tick_ = tick;
  outcome_ = JobOutcome::None;
  return true;
}

void EquipmentModule::finish_job(JobOutcome outcome) {
  job_.clear();
  outcome_ = outcome;
}

void EquipmentModule::evaluate(const ScanContext& ctx) {
  sense(ctx);
  if (ctx.estop || ctx.state == MachineState::ABORTING || ctx.state == MachineState::ABORTED ||
      ctx.state == MachineState::CLEARING) {
    return;
  }
  if (ctx.state == MachineState::RESETTING) {
    home(ctx);
    return;
  }
  if (!busy()) return;
  if (child_faulted()) {
    abandon();
    finish_job(JobOutcome::Abandoned);
    audit("job abandoned after a control module fault");
    return;
  }
  run_job(ctx);
}

void EquipmentModule::safe_state() {
  job_.clear();
  outcome_ = JobOutcome::None;
}

bool EquipmentModule::part_done(MachineState acting) const {
  switch (acting) {
    case MachineState::STOPPING:
    case MachineState::HOLDING:
    case MachineState::SUSPENDING:
    case MachineState::COMPLETING:
      return !busy();
    case MachineState::RESETTING:
      return homed();
    default:
      return true;
  }
}

bool EquipmentModule::motion_active() const {
  for (const auto& c : children()) {
    if (c->motion_active()) return true;
  }
  return false;
}

void EquipmentModule::describe(ModuleSnapshot& out) const { out.signals["Job"] = job_.empty() ? "Idle" : job_; }

void EquipmentModule::abandon() {
  for (const auto& c : children()) c->safe_state();
}

bool EquipmentModule::child_faulted() const {
  for (const auto& c : children()) {
    if (auto* cyl = dynamic_cast<const actuators::CylinderModule*>(c.get()); cyl && cyl->faulted()) return true;
    if (auto* ax = dynamic_cast<const actuators::AxisModule*>(c.get()); ax && ax->faulted()) return true;
  }
  return false;
}

void EquipmentModule::on_state_entered(MachineState s) {
  if (s == MachineState::RESETTING) {
    homing_ = true;
  } else if (homing_) {
    homing_ = false;
    for (const auto& c : children()) c->safe_state();
  }
}

void EquipmentModule::on_reaction(errors::LocalAction action) {
  if (action != errors::LocalAction::AbortNow) return;
  safe_state();
  for (const auto& c : children()) c->safe_state();
}

// ---------------------------------------------------------------------------

StackModule::StackModule(const ModulePath& path, actuators::CylinderParams pusher)
    : EquipmentModule(path, "Stack") {
  pusher_ = &add<actuators::CylinderModule>(path.child("Pusher"), pusher);
}

bool StackModule::request_feed(std::int64_t tick) {
  if (!start_job("Feed", tick)) return false;
  step_ = Step::Extend;
  pusher_->act_extend();
  return true;
}

void StackModule::sense(const ScanContext& ctx) {
  wp_at_pickup_ = ctx.io->di(signal_name(path(), "DI_WpAtPickup"));
  stack_filled_ = ctx.io->di(signal_name(path(), "DI_StackFilled"));
  metal_ = ctx.io->di(signal_name(path(), "DI_Metal"));
  white_ = ctx.io->di(signal_name(path(), "DI_White"));
}

void StackModule::run_job(const ScanContext& /*ctx*/) {
  switch (step_) {
    case Step::Extend:
      if (pusher_->extended()) {
        step_ = Step::Retract;
        pusher_->retract();
      }
      break;
    case Step::Retract:
      if (pusher_->retracted()) finish_job(JobOutcome::Done);
      break;
  }
}

void StackModule::home(const ScanContext& /*ctx*/) { pusher_->retract(); }
bool StackModule::homed() const { return pusher_->retracted(); }

void StackModule::declare_io(IoImage& io) const {
  for (const char* s : {"DI_WpAtPickup", "DI_StackFilled", "DI_Metal", "DI_White"}) {
    io.digital_inputs[signal_name(path(), s)] = false;
  }
}

void StackModule::describe(ModuleSnapshot& out) const {
  EquipmentModule::describe(out);
  out.signals["DI_WpAtPickup"] = wp_at_pickup_;
  out.signals["DI_StackFilled"] = stack_filled_;
  out.signals["DI_Metal"] = metal_;
  out.signals["DI_White"] = white_;
}

// ---------------------------------------------------------------------------

CraneModule::CraneModule(const ModulePath& path, const actuators::AxisConfig& base, actuators::CylinderParams lift,
                         int grip_dwell_ticks, double home_angle)
    : EquipmentModule(path, "Crane"), grip_dwell_ticks_(grip_dwell_ticks), home_angle_(home_angle) {
  base_ = &add<actuators::AxisModule>(path.child("Base"), base);
  lift_ = &add<actuators::CylinderModule>(path.child("Lift"), lift);
  gripper_ = &add<actuators::GripperModule>(path.child("Gripper"));
}

std::string_view CraneModule::step_name(Step s) {
  switch (s) {
    case Step::Prepare: return "Prepare";
    case Step::RotateToSource: return "RotateToSource";
    case Step::LowerAtSource: return "LowerAtSource";
    case Step::Grip: return "Grip";
    case Step::ProductMissing: return "ProductMissing";
    case Step::RaiseFromSource: return "RaiseFromSource";
    case Step::RotateToTarget: return "RotateToTarget";
    case Step::LowerAtTarget: return "LowerAtTarget";
    case Step::Release: return "Release";
    case Step::RaiseFromTarget: return "RaiseFromTarget";
  }
  return "?";
}

bool CraneModule::request_transfer(double from, double to, std::int64_t tick) {
  if (!start_job("Transfer", tick)) return false;
  from_ = from;
  to_ = to;
  step_ = Step::Prepare;
  step_tick_ = tick;
  lift_->retract();
  return true;
}

bool CraneModule::working_at(double angle) const {
  if (!busy()) return false;
  if (step_ <= Step::RaiseFromSource) return from_ == angle;
  return to_ == angle;
}

void CraneModule::enter(Step s, const ScanContext& ctx) {
  step_ = s;
  step_tick_ = ctx.tick;
  switch (s) {
    case Step::RotateToSource: base_->move_to(from_); break;
    case Step::RotateToTarget: base_->move_to(to_); break;
    case Step::LowerAtSource:
    case Step::LowerAtTarget: lift_->act_extend(); break;
    case Step::RaiseFromSource:
    case Step::RaiseFromTarget: lift_->retract(); break;
    case Step::Grip: gripper_->grip(); break;
    case Step::Release: gripper_->release(); break;
    case Step::Prepare:
    case Step::ProductMissing: break;
  }
}

void CraneModule::run_job(const ScanContext& ctx) {
  switch (step_) {
    case Step::Prepare:
      if (lift_->retracted()) enter(Step::RotateToSource, ctx);
      break;
    case Step::RotateToSource:
      if (base_->in_position(from_)) enter(Step::LowerAtSource, ctx);
      break;
    case Step::LowerAtSource:
      if (lift_->extended()) enter(Step::Grip, ctx);
      break;
    case Step::Grip:
      if (ctx.tick - step_tick_ < grip_dwell_ticks_) break;
      if (gripper_->product()) {
        enter(Step::RaiseFromSource, ctx);
      } else {
        report(errors::numbers::kGripperProductMissing, errors::Severity::Error,
               "product sensor not triggered after grip", ctx);
        step_ = Step::ProductMissing;
      }
      break;
    case Step::ProductMissing:
      break;
    case Step::RaiseFromSource:
      if (lift_->retracted()) enter(Step::RotateToTarget, ctx);
      break;
    case Step::RotateToTarget:
      if (base_->in_position(to_)) enter(Step::LowerAtTarget, ctx);
      break;
    case Step::LowerAtTarget:
      if (lift_->extended()) enter(Step::Release, ctx);
      break;
    case Step::Release:
      if (ctx.tick - step_tick_ >= 1) enter(Step::RaiseFromTarget, ctx);
      break;
    case Step::RaiseFromTarget:
      if (lift_->retracted()) finish_job(JobOutcome::Done);
      break;
  }
}

void CraneModule::home(const ScanContext& /*ctx*/) {
  gripper_->release();
  if (!lift_->retracted()) {
    lift_->retract();
    return;
  }
  if (!base_->in_position(home_angle_) && !base_->target()) base_->move_to(home_angle_);
}

bool CraneModule::homed() const {
  return lift_->retracted() && base_->in_position(home_angle_) && !gripper_->vacuum();
}

void CraneModule::abandon() {
  // Keep holding the work piece; only motion stops.
  base_->stop();
  lift_->release();
}

void CraneModule::describe(ModuleSnapshot& out) const {
  EquipmentModule::describe(out);
  if (busy()) out.signals["Step"] = std::string(step_name(step_));
}

// ---------------------------------------------------------------------------

StampModule::StampModule(const ModulePath& path, actuators::CylinderParams press, int cycle_ticks)
    : EquipmentModule(path, "Stamp"), cycle_ticks_(cycle_ticks) {
  press_ = &add<actuators::CylinderModule>(path.child("Press"), press);
}

bool StampModule::request_press(std::int64_t tick) {
  if (!start_job("Press", tick)) return false;
  step_ = Step::Extend;
  press_->act_extend();
  return true;
}

void StampModule::sense(const ScanContext& ctx) { wp_at_stamp_ = ctx.io->di(signal_name(path(), "DI_WpAtStamp")); }

void StampModule::run_job(const ScanContext& ctx) {
  switch (step_) {
    case Step::Extend:
      if (press_->extended()) step_ = Step::Dwell;
      break;
    case Step::Dwell:
      if (ctx.tick - job_tick() >= cycle_ticks_) {
        step_ = Step::Retract;
        press_->retract();
      }
      break;
    case Step::Retract:
      if (press_->retracted()) finish_job(JobOutcome::Done);
      break;
  }
}

void StampModule::home(const ScanContext& /*ctx*/) { press_->retract(); }
bool StampModule::homed() const { return press_->retracted(); }

void StampModule::declare_io(IoImage& io) const { io.digital_inputs[signal_name(path(), "DI_WpAtStamp")] = false; }

void StampModule::describe(ModuleSnapshot& out) const {
  EquipmentModule::describe(out);
  out.signals["DI_WpAtStamp"] = wp_at_stamp_;
}

// ---------------------------------------------------------------------------

SortingConveyorModule::SortingConveyorModule(const ModulePath& path, const PlantConfig& config,
                                             const std::vector<actuators::CylinderParams>& separators)
    : EquipmentModule(path, "SortingConveyor"),
      separator_positions_(config.separator_positions),
      belt_length_(config.belt_length),
      sensor_position_(config.sensor_position),
      watchdog_ticks_(config.belt_watchdog_ticks()),
      flush_ticks_(static_cast<int>(std::ceil(config.belt_length / config.belt_axis.max_speed)) + 2) {
  belt_ = &add<actuators::AxisModule>(path.child("Belt"), config.belt_axis);
  for (std::size_t i = 0; i < separators.size(); ++i) {
    separators_.push_back(
        &add<actuators::CylinderModule>(path.child("Separator" + std::to_string(i + 1)), separators[i]));
  }
}

bool SortingConveyorModule::request_sort(int ramp, std::int64_t tick) {
  if (!start_job("Sort", tick)) return false;
  ramp_ = ramp;
  step_ = Step::WaitSensor;
  belt_->run_endless(+1);
  if (ramp_ < static_cast<int>(separators_.size())) separators_[ramp_]->act_extend();
  return true;
}

void SortingConveyorModule::sense(const ScanContext& ctx) {
  wp_at_sensor_ = ctx.io->di(signal_name(path(), "DI_WpAtSensor"));
}

bool SortingConveyorModule::separators_retracted() const {
  for (const auto* s : separators_) {
    if (!s->retracted()) return false;
  }
  return true;
}

void SortingConveyorModule::retract_separators() {
  for (auto* s : separators_) s->retract();
}

void SortingConveyorModule::run_job(const ScanContext& ctx) {
  switch (step_) {
    case Step::WaitSensor:
      if (wp_at_sensor_) {
        anchor_ = belt_->actual();
        estimate_ = sensor_position_;
        step_ = Step::Track;
      } else if (ctx.tick - job_tick() >= watchdog_ticks_) {
        report(errors::numbers::kBeltWorkPieceMissing, errors::Severity::Warning,
               "work piece expected at the belt sensor but not registered", ctx);
        step_ = Step::Finish;
        belt_->stop();
        retract_separators();
      }
      break;
    case Step::Track: {
      estimate_ = sensor_position_ + belt_->actual() - anchor_;
      const double goal = ramp_ < static_cast<int>(separators_.size())
                              ? separator_positions_[ramp_] + belt_->config().max_speed
                              : belt_length_;
      if (estimate_ >= goal) {
        step_ = Step::Finish;
        belt_->stop();
        retract_separators();
      }
      break;
    }
    case Step::Finish:
      if (separators_retracted()) finish_job(JobOutcome::Done);
      break;
  }
}

void SortingConveyorModule::home(const ScanContext& ctx) {
  retract_separators();
  if (flush_requested_ && !flush_started_) {
    flush_started_ = ctx.tick;
    flushing_ = true;
    belt_->run_endless(+1);
  }
  if (flushing_ && ctx.tick - *flush_started_ >= flush_ticks_) {
    belt_->stop();
    flushing_ = false;
    flush_requested_ = false;
    flush_started_.reset();
    audit("belt flushed");
  }
}

bool SortingConveyorModule::homed() const { return separators_retracted() && !flush_requested_; }

void SortingConveyorModule::declare_io(IoImage& io) const {
  io.digital_inputs[signal_name(path(), "DI_WpAtSensor")] = false;
}

void SortingConveyorModule::describe(ModuleSnapshot& out) const {
  EquipmentModule::describe(out);
  out.signals["DI_WpAtSensor"] = wp_at_sensor_;
  if (busy()) out.signals["TargetRamp"] = static_cast<double>(ramp_);
}

}  // namespace plcsim::plant
