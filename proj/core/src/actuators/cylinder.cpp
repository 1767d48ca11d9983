#include "plcsim/actuators/cylinder.hpp"

#include <stdexcept>

namespace plcsim::actuators {

std::string_view to_string(CylinderKind k) { return k == CylinderKind::Monostable ? "Monostable" : "Bistable"; }

std::optional<CylinderKind> parse_cylinder_kind(std::string_view text) {
  if (text == "Monostable" || text == "monostable") return CylinderKind::Monostable;
  if (text == "Bistable" || text == "bistable") return CylinderKind::Bistable;
  return std::nullopt;
}

std::string_view to_string(CylinderStatus s) {
  switch (s) {
    case CylinderStatus::Idle: return "Idle";
    case CylinderStatus::Extending: return "Extending";
    case CylinderStatus::Retracting: return "Retracting";
    case CylinderStatus::Extended: return "Extended";
    case CylinderStatus::Retracted: return "Retracted";
    case CylinderStatus::Faulted: return "Faulted";
  }
  return "?";
}

CylinderModule::CylinderModule(ModulePath path, CylinderParams params)
    : Module(std::move(path), ModuleLevel::ControlModule, "Cylinder"), params_(params) {
  if (params_.travel_ticks <= 0 || params_.timeout_ticks <= 0) {
    throw std::invalid_argument("cylinder ticks must be positive");
  }
}

bool CylinderModule::do_extend() const {
  if (target_ != Target::Extend) return false;
  // A bistable cylinder keeps its position without air; the valve closes at the end stop.
  return params_.kind == CylinderKind::Monostable || status_ != CylinderStatus::Extended;
}

bool CylinderModule::do_retract() const {
  return params_.kind == CylinderKind::Bistable && target_ == Target::Retract &&
         status_ != CylinderStatus::Retracted;
}

void CylinderModule::set_target(Target t) {
  if (t != target_) {
    target_ = t;
    target_changed_ = true;
  }
}

modes::CommandResult CylinderModule::act_extend() {
  if (faulted()) return {false, "faulted"};
  set_target(Target::Extend);
  return {true, {}};
}

modes::CommandResult CylinderModule::act_retract() {
  if (params_.kind == CylinderKind::Monostable) return {false, "no such action: ACT_Retract"};
  if (faulted()) return {false, "faulted"};
  set_target(Target::Retract);
  return {true, {}};
}

modes::CommandResult CylinderModule::retract() {
  if (faulted()) return {false, "faulted"};
  set_target(Target::Retract);
  return {true, {}};
}

void CylinderModule::release() {
  target_ = Target::None;
  target_changed_ = false;
}

void CylinderModule::evaluate(const ScanContext& ctx) {
  di_extended_ = ctx.io->di(signal_name(path(), "DI_Extended"));
  di_retracted_ = ctx.io->di(signal_name(path(), "DI_Retracted"));

  if (status_ == CylinderStatus::Faulted) {
    if (ctx.has_open_error(path())) return;
    status_ = CylinderStatus::Idle;
  }
  if (target_changed_) {
    command_tick_ = ctx.tick;
    target_changed_ = false;
  }

  switch (target_) {
    case Target::None:
      status_ = di_extended_ ? CylinderStatus::Extended
                : di_retracted_ ? CylinderStatus::Retracted
                                : CylinderStatus::Idle;
      return;
    case Target::Extend:
      if (di_extended_) {
        status_ = CylinderStatus::Extended;
        return;
      }
      status_ = CylinderStatus::Extending;
      break;
    case Target::Retract:
      if (di_retracted_) {
        status_ = CylinderStatus::Retracted;
        return;
      }
      status_ = CylinderStatus::Retracting;
      break;
  }

  if (ctx.tick - command_tick_ >= params_.timeout_ticks) {
    const char* end = target_ == Target::Extend ? "extended" : "retracted";
    report(errors::numbers::kEndPositionTimeout, errors::Severity::Malfunction,
           std::string("end position ") + end + " not reached within " + std::to_string(params_.timeout_ticks) +
               " ticks",
           ctx);
    status_ = CylinderStatus::Faulted;
    release();
  }
}

void CylinderModule::write_outputs(IoImage& io) const {
  io.digital_outputs[signal_name(path(), "DO_Extend")] = do_extend();
  if (params_.kind == CylinderKind::Bistable) io.digital_outputs[signal_name(path(), "DO_Retract")] = do_retract();
}

void CylinderModule::declare_io(IoImage& io) const {
  write_outputs(io);
  io.digital_inputs[signal_name(path(), "DI_Extended")] = false;
  io.digital_inputs[signal_name(path(), "DI_Retracted")] = false;
}

void CylinderModule::describe(ModuleSnapshot& out) const {
  out.signals["DO_Extend"] = do_extend();
  if (params_.kind == CylinderKind::Bistable) out.signals["DO_Retract"] = do_retract();
  out.signals["DI_Extended"] = di_extended_;
  out.signals["DI_Retracted"] = di_retracted_;
  out.signals["Status"] = std::string(to_string(status_));
}

ModuleManifest CylinderModule::manifest() const {
  ModuleManifest m = Module::manifest();
  m.variant = std::string(to_string(params_.kind));
  m.signals = {"DO_Extend", "DI_Extended", "DI_Retracted", "Status"};
  m.actions = {"ACT_Extend"};
  if (params_.kind == CylinderKind::Bistable) {
    m.signals.push_back("DO_Retract");
    m.actions.push_back("ACT_Retract");
  }
  return m;
}

modes::CommandResult CylinderModule::manual_output(std::string_view signal, bool value) {
  if (signal == "DO_Extend") {
    if (value) return act_extend();
    if (params_.kind == CylinderKind::Monostable) return retract();
    release();
    return {true, {}};
  }
  if (signal == "DO_Retract" && params_.kind == CylinderKind::Bistable) {
    if (value) return act_retract();
    release();
    return {true, {}};
  }
  return Module::manual_output(signal, value);
}

void CylinderModule::on_reaction(errors::LocalAction action) {
  if (action == errors::LocalAction::AbortNow) release();
}

}  // namespace plcsim::actuators
