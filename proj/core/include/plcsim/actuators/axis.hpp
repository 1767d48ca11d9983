#pragma once

#include <optional>
#include <string_view>

#include "plcsim/actuators/axis_config.hpp"
#include "plcsim/runtime/module.hpp"

namespace plcsim::actuators {

enum class AxisState { Idle, Moving, Jogging, Faulted };
std::string_view to_string(AxisState s);

/// Servo axis control module. Consumers see a reference and an actual
/// position only; the feedback device is decoded here.
class AxisModule : public Module {
 public:
  AxisModule(ModulePath path, AxisConfig config);

  [[nodiscard]] const AxisConfig& config() const { return config_; }
  [[nodiscard]] double reference() const { return reference_; }
  [[nodiscard]] double actual() const { return actual_; }
  [[nodiscard]] std::optional<double> target() const { return target_; }
  [[nodiscard]] AxisState state() const { return state_; }
  [[nodiscard]] bool enabled() const { return state_ == AxisState::Moving || state_ == AxisState::Jogging; }
  [[nodiscard]] bool faulted() const { return state_ == AxisState::Faulted; }
  /// Reference and actual both at `pos` and no motion pending.
  [[nodiscard]] bool in_position(double pos) const;

  /// Positioning mode. Limited axes clamp the target into range.
  modes::CommandResult move_to(double target);
  /// Endless motion at max speed; direction -1, 0 (stop) or +1.
  modes::CommandResult run_endless(int direction);
  modes::CommandResult jog(int direction) override { return run_endless(direction); }
  void stop();

  void evaluate(const ScanContext& ctx) override;
  void write_outputs(IoImage& io) const override;
  void declare_io(IoImage& io) const override;
  void safe_state() override { stop(); }
  [[nodiscard]] bool motion_active() const override { return enabled(); }
  void describe(ModuleSnapshot& out) const override;
  [[nodiscard]] ModuleManifest manifest() const override;
  modes::CommandResult manual_output(std::string_view signal, bool value) override;

 protected:
  void on_mode_entered(modes::OperatingMode) override { stop(); }
  void on_reaction(errors::LocalAction action) override;

 private:
  double clamp(double pos) const;
  void fault(int number, errors::Severity severity, std::string cause, const ScanContext& ctx);

  AxisConfig config_;
  double reference_ = 0.0;
  double actual_ = 0.0;
  std::optional<double> target_;
  int direction_ = 0;
  AxisState state_ = AxisState::Idle;

  bool homed_ = false;
  bool was_enabled_ = false;
  bool reference_moved_ = false;
  int drag_count_ = 0;
  int jam_count_ = 0;
};

}  // namespace plcsim::actuators
