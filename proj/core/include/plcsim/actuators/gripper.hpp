#pragma once

#include "plcsim/runtime/module.hpp"

namespace plcsim::actuators {

/// Vacuum gripper: one valve, one product sensor. Checking the sensor after a
/// grip is the equipment module's business.
class GripperModule : public Module {
 public:
  explicit GripperModule(ModulePath path);

  void grip() { vacuum_ = true; }
  void release() { vacuum_ = false; }
  [[nodiscard]] bool vacuum() const { return vacuum_; }
  [[nodiscard]] bool product() const { return di_product_; }

  void evaluate(const ScanContext& ctx) override;
  void write_outputs(IoImage& io) const override;
  void declare_io(IoImage& io) const override;
  void safe_state() override { release(); }
  void describe(ModuleSnapshot& out) const override;
  [[nodiscard]] ModuleManifest manifest() const override;
  modes::CommandResult manual_output(std::string_view signal, bool value) override;

 protected:
  void on_reaction(errors::LocalAction action) override;

 private:
  bool vacuum_ = false;
  bool di_product_ = false;
};

}  // namespace plcsim::actuators
