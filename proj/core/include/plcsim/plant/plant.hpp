#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "plcsim/actuators/cylinder.hpp"
#include "plcsim/modes/machine.hpp"
#include "plcsim/plant/config.hpp"
#include "plcsim/plant/fault.hpp"
#include "plcsim/plant/workpiece.hpp"
#include "plcsim/runtime/io_image.hpp"

namespace plcsim::plant {

/// Discrete-time simulation of the xPPU mechanics. Reads only outputs, writes
/// only inputs.
class Plant {
 public:
  /// `cylinder_kinds` maps absolute cylinder paths to their resolved kind.
  Plant(const PlantConfig& config, const std::map<std::string, actuators::CylinderKind>& cylinder_kinds);

  /// Phase 2: copies every sensor into the input image.
  void latch_inputs(IoImage& io, std::int64_t tick) const;
  /// Phase 7: advances the mechanics by one tick from the output image.
  void step(const IoImage& io, std::int64_t tick);

  /// Rejects unknown targets and overlapping faults on the same target.
  modes::CommandResult inject(const FaultSpec& spec, std::int64_t tick);
  modes::CommandResult clear(const std::string& id);
  [[nodiscard]] bool any_fault_active(std::int64_t tick) const;
  [[nodiscard]] const std::map<std::string, FaultSpec>& faults() const { return faults_; }

  void press_estop() { estop_ = true; }
  void release_estop() { estop_ = false; }
  [[nodiscard]] bool estop_pressed() const { return estop_; }

  [[nodiscard]] PlantView view(std::int64_t tick) const;
  [[nodiscard]] const std::vector<WorkPiece>& workpieces() const { return wps_; }
  [[nodiscard]] bool has_path(const ModulePath& p) const;

  // Signal names of equipment-level sensors.
  [[nodiscard]] std::string unit_sensor(std::string_view name) const;
  [[nodiscard]] std::string em_sensor(std::string_view em, std::string_view name) const;

 private:
  struct Cylinder {
    actuators::CylinderKind kind;
    int stroke = 0;
  };
  struct Axis {
    actuators::AxisConfig config;
    double actual = 0.0;
  };

  [[nodiscard]] const FaultSpec* active_fault(FaultKind kind, const std::string& key, std::int64_t tick) const;
  [[nodiscard]] WorkPiece* wp_at(LocationKind kind);
  [[nodiscard]] const WorkPiece* wp_at(LocationKind kind) const;
  [[nodiscard]] std::optional<double> station_at(double angle) const;
  [[nodiscard]] bool cylinder_extended(const std::string& path) const;
  [[nodiscard]] bool out(const IoImage& io, const std::string& name) const;

  PlantConfig config_;
  std::string unit_;
  std::map<std::string, Cylinder> cylinders_;
  std::map<std::string, Axis> axes_;
  std::set<std::string> grippers_;
  std::set<std::string> equipment_paths_;
  std::vector<WorkPiece> wps_;
  /// Ids still in the stack, next to feed first.
  std::vector<int> stack_;
  std::optional<int> held_;
  bool estop_ = false;
  std::map<std::string, FaultSpec> faults_;
};

}  // namespace plcsim::plant
