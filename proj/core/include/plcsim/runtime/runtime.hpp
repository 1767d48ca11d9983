#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "plcsim/errors/catalog.hpp"
#include "plcsim/modes/machine.hpp"
#include "plcsim/modes/mode_manager.hpp"
#include "plcsim/oo/oo_strategy.hpp"
#include "plcsim/plant/config.hpp"
#include "plcsim/plant/plant.hpp"
#include "plcsim/plant/xppu_unit.hpp"
#include "plcsim/procedural/reaction_matrix.hpp"
#include "plcsim/runtime/command.hpp"
#include "plcsim/runtime/error_strategy.hpp"
#include "plcsim/runtime/snapshot.hpp"

namespace plcsim {

enum class StrategyKind { Procedural, OO };
std::string_view to_string(StrategyKind k);
std::optional<StrategyKind> parse_strategy_kind(std::string_view text);

struct RuntimeOptions {
  StrategyKind strategy = StrategyKind::Procedural;
  /// OO only.
  oo::ManagerKind manager = oo::ManagerKind::Base;
  /// Procedural only; derived from the hierarchy when empty.
  std::optional<procedural::ReactionMatrix> matrix;
  /// Must outlive the runtime; the built-in catalog when null.
  const errors::ErrorCatalog* catalog = nullptr;
  /// Virtual scan period.
  int period_ms = 10;
};

/// Scan-cycle executor for one xPPU. All members except enqueue() belong to
/// the thread that calls scan().
class Runtime {
 public:
  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  /// Number of completed scans; the latest snapshot carries this tick.
  [[nodiscard]] std::int64_t tick() const { return tick_; }
  [[nodiscard]] int period_ms() const { return period_ms_; }

  /// Thread-safe. Applied at the start of the next scan.
  EnqueueResult enqueue(CommandBody body, CommandSource source = CommandSource::Scenario);

  /// Executes one scan and returns its snapshot.
  const Snapshot& scan();
  /// Executes `n` scans and returns their snapshots.
  std::vector<Snapshot> run(std::int64_t n);
  [[nodiscard]] const Snapshot& snapshot() const { return snapshot_; }

  [[nodiscard]] modes::MachineState state() const { return machine_.state(); }
  [[nodiscard]] modes::OperatingMode mode() const { return modes_.current(); }
  [[nodiscard]] const plant::PlantConfig& config() const { return config_; }
  [[nodiscard]] plant::XppuUnit& root() { return *unit_; }
  [[nodiscard]] const plant::XppuUnit& root() const { return *unit_; }
  [[nodiscard]] Module* find(const ModulePath& path);
  [[nodiscard]] std::vector<ModulePath> module_paths() const;
  [[nodiscard]] std::vector<ModuleManifest> manifests() const;
  [[nodiscard]] ErrorStrategy& strategy() { return *strategy_; }
  [[nodiscard]] const ErrorStrategy& strategy() const { return *strategy_; }
  [[nodiscard]] const plant::Plant& plant() const { return *plant_; }
  /// Reaction deliveries of the latest scan.
  [[nodiscard]] const std::vector<DeliveryReport>& last_deliveries() const { return deliveries_; }

 private:
  friend std::unique_ptr<Runtime> build_runtime(const plant::PlantConfig&, RuntimeOptions);
  Runtime(plant::PlantConfig config, RuntimeOptions options);

  CommandOutcome apply(const Command& c);
  void sync_state();
  modes::ModeGateInputs gate_inputs() const;
  void resolve_mode();
  [[nodiscard]] bool axes_within_limits() const;
  void build_snapshot();

  plant::PlantConfig config_;
  const errors::ErrorCatalog* catalog_;
  int period_ms_;
  std::unique_ptr<ErrorStrategy> strategy_;
  std::unique_ptr<plant::XppuUnit> unit_;
  std::vector<Module*> order_;
  std::unique_ptr<plant::Plant> plant_;
  AuditLog audit_;
  modes::StateMachine machine_;
  modes::ModeManager modes_;
  IoImage io_;
  CommandQueue queue_;

  std::int64_t tick_ = 0;
  modes::MachineState notified_state_ = modes::MachineState::STOPPED;
  modes::OperatingMode notified_mode_ = modes::OperatingMode::Automatic;
  modes::PartReports reports_;
  std::optional<CommandOutcome> pending_mode_;
  std::vector<CommandOutcome> outcomes_;
  std::vector<DeliveryReport> deliveries_;
  Snapshot snapshot_;
};

/// Throws BuildError on an invalid hierarchy or configuration.
std::unique_ptr<Runtime> build_runtime(const plant::PlantConfig& config, RuntimeOptions options = {});

}  // namespace plcsim
