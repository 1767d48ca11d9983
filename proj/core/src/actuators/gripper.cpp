#include "plcsim/actuators/gripper.hpp"

namespace plcsim::actuators {

GripperModule::GripperModule(ModulePath path)
    : Module(std::move(path), ModuleLevel::ControlModule, "VacuumGripper") {}

void GripperModule::evaluate(const ScanContext& ctx) { di_product_ = ctx.io->di(signal_name(path(), "DI_Product")); }

void GripperModule::write_outputs(IoImage& io) const { io.digital_outputs[signal_name(path(), "DO_Vacuum")] = vacuum_; }

void GripperModule::declare_io(IoImage& io) const {
  write_outputs(io);
  io.digital_inputs[signal_name(path(), "DI_Product")] = false;
}

void GripperModule::describe(ModuleSnapshot& out) const {
  out.signals["DO_Vacuum"] = vacuum_;
  out.signals["DI_Product"] = di_product_;
}

ModuleManifest GripperModule::manifest() const {
  ModuleManifest m = Module::manifest();
  m.variant = "Vacuum";
  m.signals = {"DO_Vacuum", "DI_Product"};
  m.actions = {"ACT_Grip", "ACT_Release"};
  return m;
}

modes::CommandResult GripperModule::manual_output(std::string_view signal, bool value) {
  if (signal != "DO_Vacuum") return Module::manual_output(signal, value);
  vacuum_ = value;
  return {true, {}};
}

void GripperModule::on_reaction(errors::LocalAction action) {
  if (action == errors::LocalAction::AbortNow) release();
}

}  // namespace plcsim::actuators
