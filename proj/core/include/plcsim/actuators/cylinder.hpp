#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "plcsim/runtime/module.hpp"

namespace plcsim::actuators {

enum class CylinderKind { Monostable, Bistable };
enum class CylinderStatus { Idle, Extending, Retracting, Extended, Retracted, Faulted };

std::string_view to_string(CylinderKind k);
std::optional<CylinderKind> parse_cylinder_kind(std::string_view text);
std::string_view to_string(CylinderStatus s);

struct CylinderParams {
  CylinderKind kind = CylinderKind::Bistable;
  int travel_ticks = 8;
  int timeout_ticks = 24;

  bool operator==(const CylinderParams&) const = default;
};

/// Pneumatic cylinder control module. A monostable cylinder has one valve and
/// retracts on a spring once DO_Extend drops; a bistable one has a second
/// valve driven by ACT_Retract.
class CylinderModule : public Module {
 public:
  CylinderModule(ModulePath path, CylinderParams params);

  [[nodiscard]] CylinderKind cylinder_kind() const { return params_.kind; }
  [[nodiscard]] const CylinderParams& params() const { return params_; }
  [[nodiscard]] CylinderStatus status() const { return status_; }
  [[nodiscard]] bool do_extend() const;
  [[nodiscard]] bool do_retract() const;

  modes::CommandResult act_extend();
  /// Only present on bistable cylinders.
  modes::CommandResult act_retract();
  /// Drives to the retracted end: ACT_Retract on bistable, dropping DO_Extend on monostable.
  modes::CommandResult retract();
  /// Valves off, end-position monitoring stops.
  void release();

  [[nodiscard]] bool extended() const { return status_ == CylinderStatus::Extended; }
  [[nodiscard]] bool retracted() const { return status_ == CylinderStatus::Retracted; }
  [[nodiscard]] bool faulted() const { return status_ == CylinderStatus::Faulted; }

  void evaluate(const ScanContext& ctx) override;
  void write_outputs(IoImage& io) const override;
  void declare_io(IoImage& io) const override;
  void safe_state() override { release(); }
  [[nodiscard]] bool motion_active() const override { return do_extend() || do_retract(); }
  void describe(ModuleSnapshot& out) const override;
  [[nodiscard]] ModuleManifest manifest() const override;
  modes::CommandResult manual_output(std::string_view signal, bool value) override;

 protected:
  void on_mode_entered(modes::OperatingMode) override { release(); }
  void on_reaction(errors::LocalAction action) override;

 private:
  enum class Target { None, Extend, Retract };
  void set_target(Target t);

  CylinderParams params_;
  Target target_ = Target::None;
  bool target_changed_ = false;
  std::int64_t command_tick_ = 0;
  CylinderStatus status_ = CylinderStatus::Idle;
  bool di_extended_ = false;
  bool di_retracted_ = false;
};

}  // namespace plcsim::actuators
