#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plcsim/actuators/axis.hpp"
#include "plcsim/actuators/cylinder.hpp"
#include "plcsim/actuators/gripper.hpp"
#include "plcsim/plant/config.hpp"
#include "plcsim/runtime/module.hpp"

namespace plcsim::plant {

enum class JobOutcome { None, Done, Abandoned };

/// Equipment module with one job at a time. Jobs run to completion in every
/// machine state except the aborting ones; whether new jobs are accepted
/// depends on the latched local reaction.
class EquipmentModule : public Module {
 public:
  EquipmentModule(ModulePath path, std::string kind);

  [[nodiscard]] bool busy() const { return !job_.empty(); }
  [[nodiscard]] const std::string& job() const { return job_; }
  /// Idle and not latched by a reaction.
  [[nodiscard]] bool accepting() const { return !busy() && reaction() == errors::LocalAction::Ignore; }
  /// Result of the last job, reported once.
  JobOutcome take_outcome();

  void evaluate(const ScanContext& ctx) final;
  void safe_state() override;
  [[nodiscard]] bool part_done(modes::MachineState acting) const override;
  [[nodiscard]] bool motion_active() const override;
  void describe(ModuleSnapshot& out) const override;

 protected:
  bool start_job(std::string name, std::int64_t tick);
  void finish_job(JobOutcome outcome);
  [[nodiscard]] std::int64_t job_tick() const { return job_tick_; }

  virtual void sense(const ScanContext& /*ctx*/) {}
  virtual void run_job(const ScanContext& ctx) = 0;
  /// Called every scan while RESETTING.
  virtual void home(const ScanContext& /*ctx*/) {}
  [[nodiscard]] virtual bool homed() const { return true; }
  /// Stops motion of the children after a child fault made the job impossible.
  virtual void abandon();
  [[nodiscard]] bool child_faulted() const;

  void on_state_entered(modes::MachineState s) override;
  void on_reaction(errors::LocalAction action) override;

 private:
  std::string job_;
  std::int64_t job_tick_ = 0;
  JobOutcome outcome_ = JobOutcome::None;
  bool homing_ = false;
};

class StackModule : public EquipmentModule {
 public:
  StackModule(const ModulePath& path, actuators::CylinderParams pusher);

  bool request_feed(std::int64_t tick);
  [[nodiscard]] actuators::CylinderModule& pusher() { return *pusher_; }
  void declare_io(IoImage& io) const override;
  void describe(ModuleSnapshot& out) const override;

 protected:
  void sense(const ScanContext& ctx) override;
  void run_job(const ScanContext& ctx) override;
  void home(const ScanContext& ctx) override;
  [[nodiscard]] bool homed() const override;

 private:
  enum class Step { Extend, Retract };
  actuators::CylinderModule* pusher_;
  Step step_ = Step::Extend;
  bool wp_at_pickup_ = false;
  bool stack_filled_ = false;
  bool metal_ = false;
  bool white_ = false;
};

class CraneModule : public EquipmentModule {
 public:
  CraneModule(const ModulePath& path, const actuators::AxisConfig& base, actuators::CylinderParams lift,
              int grip_dwell_ticks, double home_angle);

  bool request_transfer(double from, double to, std::int64_t tick);
  [[nodiscard]] actuators::AxisModule& base() { return *base_; }
  [[nodiscard]] actuators::CylinderModule& lift() { return *lift_; }
  [[nodiscard]] actuators::GripperModule& gripper() { return *gripper_; }
  /// True while the gripper is down at `angle` or about to be.
  [[nodiscard]] bool working_at(double angle) const;
  void describe(ModuleSnapshot& out) const override;

 protected:
  void run_job(const ScanContext& ctx) override;
  void home(const ScanContext& ctx) override;
  [[nodiscard]] bool homed() const override;
  void abandon() override;

 private:
  enum class Step {
    Prepare,
    RotateToSource,
    LowerAtSource,
    Grip,
    ProductMissing,
    RaiseFromSource,
    RotateToTarget,
    LowerAtTarget,
    Release,
    RaiseFromTarget,
  };
  static std::string_view step_name(Step s);
  void enter(Step s, const ScanContext& ctx);

  actuators::AxisModule* base_;
  actuators::CylinderModule* lift_;
  actuators::GripperModule* gripper_;
  int grip_dwell_ticks_;
  double home_angle_;
  Step step_ = Step::Prepare;
  std::int64_t step_tick_ = 0;
  double from_ = 0.0;
  double to_ = 0.0;
};

class StampModule : public EquipmentModule {
 public:
  StampModule(const ModulePath& path, actuators::CylinderParams press, int cycle_ticks);

  bool request_press(std::int64_t tick);
  [[nodiscard]] actuators::CylinderModule& press() { return *press_; }
  void declare_io(IoImage& io) const override;
  void describe(ModuleSnapshot& out) const override;

 protected:
  void sense(const ScanContext& ctx) override;
  void run_job(const ScanContext& ctx) override;
  void home(const ScanContext& ctx) override;
  [[nodiscard]] bool homed() const override;

 private:
  enum class Step { Extend, Dwell, Retract };
  actuators::CylinderModule* press_;
  int cycle_ticks_;
  Step step_ = Step::Extend;
  bool wp_at_stamp_ = false;
};

class SortingConveyorModule : public EquipmentModule {
 public:
  SortingConveyorModule(const ModulePath& path, const PlantConfig& config,
                        const std::vector<actuators::CylinderParams>& separators);

  /// Runs the belt until the work piece handed over at the belt start reached `ramp`.
  bool request_sort(int ramp, std::int64_t tick);
  /// Next RESETTING runs the belt empty with all separators retracted.
  void request_flush() { flush_requested_ = true; }
  [[nodiscard]] actuators::AxisModule& belt() { return *belt_; }
  void declare_io(IoImage& io) const override;
  void describe(ModuleSnapshot& out) const override;

 protected:
  void sense(const ScanContext& ctx) override;
  void run_job(const ScanContext& ctx) override;
  void home(const ScanContext& ctx) override;
  [[nodiscard]] bool homed() const override;

 private:
  enum class Step { WaitSensor, Track, Finish };
  [[nodiscard]] bool separators_retracted() const;
  void retract_separators();

  actuators::AxisModule* belt_;
  std::vector<actuators::CylinderModule*> separators_;
  std::vector<double> separator_positions_;
  double belt_length_;
  double sensor_position_;
  int watchdog_ticks_;
  int flush_ticks_;

  Step step_ = Step::WaitSensor;
  int ramp_ = 0;
  double anchor_ = 0.0;
  double estimate_ = 0.0;
  bool wp_at_sensor_ = false;
  bool flush_requested_ = false;
  std::optional<std::int64_t> flush_started_;
  bool flushing_ = false;
};

}  // namespace plcsim::plant
