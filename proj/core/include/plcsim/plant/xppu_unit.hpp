#pragma once

#include <map>
#include <optional>

#include "plcsim/plant/config.hpp"
#include "plcsim/plant/equipment.hpp"

namespace plcsim::plant {

struct UnitLayout {
  double stack_angle = 0.0;
  double stamp_angle = 90.0;
  double belt_angle = 180.0;
  std::map<Color, int> ramp_for_color;

  static UnitLayout from(const PlantConfig& config);
};

/// Top of the hierarchy. Orders jobs from its equipment modules while the
/// machine executes in automatic mode and keeps track of where the work
/// pieces in flight are.
class XppuUnit : public Module {
 public:
  XppuUnit(ModulePath path, UnitLayout layout);

  /// Any of the pointers may be null when the variant lacks that module.
  void attach(StackModule* stack, CraneModule* crane, StampModule* stamp, SortingConveyorModule* conveyor);

  void evaluate(const ScanContext& ctx) override;
  void declare_io(IoImage& io) const override;
  void describe(ModuleSnapshot& out) const override;

 protected:
  void on_state_entered(modes::MachineState s) override;

 private:
  enum class Transfer { StackToStamp, StackToBelt, StampToBelt };
  struct CraneJob {
    Transfer kind;
    int ramp;
  };

  void consume_outcomes();
  void resync(const ScanContext& ctx);
  void order_jobs(const ScanContext& ctx);
  [[nodiscard]] bool belt_free() const;

  UnitLayout layout_;
  StackModule* stack_ = nullptr;
  CraneModule* crane_ = nullptr;
  StampModule* stamp_ = nullptr;
  SortingConveyorModule* conveyor_ = nullptr;

  std::optional<CraneJob> crane_job_;
  std::optional<int> belt_pending_;
  bool stamp_has_wp_ = false;
  bool stamp_pressed_ = false;
  int stamp_ramp_ = 0;
  bool belt_dirty_ = false;
  bool estop_ = false;
};

}  // namespace plcsim::plant
