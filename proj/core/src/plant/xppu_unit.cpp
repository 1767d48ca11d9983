#include "plcsim/plant/xppu_unit.hpp"

namespace plcsim::plant {

using modes::MachineState;

UnitLayout UnitLayout::from(const PlantConfig& config) {
  return UnitLayout{config.stack_angle, config.stamp_angle, config.belt_angle, config.ramp_for_color};
}

XppuUnit::XppuUnit(ModulePath path, UnitLayout layout)
    : Module(std::move(path), ModuleLevel::Unit, "xPPU"), layout_(std::move(layout)) {}

void XppuUnit::attach(StackModule* stack, CraneModule* crane, StampModule* stamp, SortingConveyorModule* conveyor) {
  stack_ = stack;
  crane_ = crane;
  stamp_ = stamp;
  conveyor_ = conveyor;
}

void XppuUnit::consume_outcomes() {
  if (stack_) stack_->take_outcome();
  if (crane_) {
    const auto out = crane_->take_outcome();
    if (out == JobOutcome::Done && crane_job_) {
      switch (crane_job_->kind) {
        case Transfer::StackToStamp:
          stamp_has_wp_ = true;
          stamp_pressed_ = false;
          stamp_ramp_ = crane_job_->ramp;
          break;
        case Transfer::StampToBelt:
          stamp_has_wp_ = false;
          stamp_pressed_ = false;
          belt_pending_ = crane_job_->ramp;
          break;
        case Transfer::StackToBelt:
          belt_pending_ = crane_job_->ramp;
          break;
      }
    }
    if (out != JobOutcome::None) crane_job_.reset();
  }
  if (stamp_ && stamp_->take_outcome() == JobOutcome::Done) stamp_pressed_ = true;
  if (conveyor_) conveyor_->take_outcome();
}

void XppuUnit::resync(const ScanContext& ctx) {
  if (!stamp_) return;
  const bool sensed = ctx.io->di(signal_name(stamp_->path(), "DI_WpAtStamp"));
  if (sensed && !stamp_has_wp_) {
    stamp_has_wp_ = true;
    stamp_pressed_ = false;
    stamp_ramp_ = layout_.ramp_for_color.at(Color::Metallic);
  } else if (!sensed) {
    stamp_has_wp_ = false;
    stamp_pressed_ = false;
  }
}

bool XppuUnit::belt_free() const { return conveyor_ && conveyor_->accepting() && !belt_pending_; }

void XppuUnit::order_jobs(const ScanContext& ctx) {
  if (conveyor_ && belt_pending_ && conveyor_->accepting()) {
    if (conveyor_->request_sort(*belt_pending_, ctx.tick)) belt_pending_.reset();
  }

  if (stamp_ && stamp_has_wp_ && !stamp_pressed_ && stamp_->accepting() &&
      !(crane_ && crane_->working_at(layout_.stamp_angle))) {
    stamp_->request_press(ctx.tick);
  }

  bool pickup = false;
  if (stack_) pickup = ctx.io->di(signal_name(stack_->path(), "DI_WpAtPickup"));

  if (crane_ && crane_->accepting()) {
    if (stamp_ && stamp_has_wp_ && stamp_pressed_ && !stamp_->busy() && belt_free()) {
      if (crane_->request_transfer(layout_.stamp_angle, layout_.belt_angle, ctx.tick)) {
        crane_job_ = CraneJob{Transfer::StampToBelt, stamp_ramp_};
      }
    } else if (pickup) {
      const bool metal = ctx.io->di(signal_name(stack_->path(), "DI_Metal"));
      const bool white = ctx.io->di(signal_name(stack_->path(), "DI_White"));
      const Color color = metal ? Color::Metallic : (white ? Color::White : Color::Black);
      const int ramp = layout_.ramp_for_color.at(color);
      if (metal && stamp_) {
        if (!stamp_has_wp_ && !stamp_->busy() &&
            crane_->request_transfer(layout_.stack_angle, layout_.stamp_angle, ctx.tick)) {
          crane_job_ = CraneJob{Transfer::StackToStamp, ramp};
        }
      } else if (belt_free()) {
        if (crane_->request_transfer(layout_.stack_angle, layout_.belt_angle, ctx.tick)) {
          crane_job_ = CraneJob{Transfer::StackToBelt, ramp};
        }
      }
    }
  }

  if (stack_ && stack_->accepting() && !pickup && ctx.io->di(signal_name(stack_->path(), "DI_StackFilled")) &&
      !(crane_ && crane_->working_at(layout_.stack_angle))) {
    stack_->request_feed(ctx.tick);
  }
}

void XppuUnit::evaluate(const ScanContext& ctx) {
  estop_ = ctx.io->di(signal_name(path(), "DI_EStop"));
  if (estop_) report(errors::numbers::kEmergencyStop, errors::Severity::Error, "emergency stop pressed", ctx);

  consume_outcomes();
  if (ctx.state == MachineState::IDLE) resync(ctx);
  if (ctx.state != MachineState::EXECUTE || ctx.mode != modes::OperatingMode::Automatic ||
      reaction() != errors::LocalAction::Ignore) {
    return;
  }
  order_jobs(ctx);
}

void XppuUnit::on_state_entered(MachineState s) {
  if (s == MachineState::ABORTING) {
    const bool belt_involved = belt_pending_.has_value() || (conveyor_ && conveyor_->busy()) ||
                               (crane_job_ && crane_job_->kind != Transfer::StackToStamp);
    if (belt_involved) belt_dirty_ = true;
    crane_job_.reset();
    belt_pending_.reset();
  } else if (s == MachineState::RESETTING && belt_dirty_ && conveyor_) {
    conveyor_->request_flush();
    belt_dirty_ = false;
  }
}

void XppuUnit::declare_io(IoImage& io) const { io.digital_inputs[signal_name(path(), "DI_EStop")] = false; }

void XppuUnit::describe(ModuleSnapshot& out) const {
  out.signals["DI_EStop"] = estop_;
  out.signals["StampWp"] = stamp_has_wp_;
  out.signals["BeltPending"] = belt_pending_.has_value();
}

}  // namespace plcsim::plant
