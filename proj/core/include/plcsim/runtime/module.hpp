#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "plcsim/errors/error_event.hpp"
#include "plcsim/errors/reaction.hpp"
#include "plcsim/modes/machine.hpp"
#include "plcsim/modes/mode_manager.hpp"
#include "plcsim/oo/error_sink.hpp"
#include "plcsim/runtime/io_image.hpp"
#include "plcsim/runtime/module_path.hpp"
#include "plcsim/runtime/snapshot.hpp"

namespace plcsim {

namespace procedural {
struct CentralExceptionList;
}

/// Signals and actions a module exposes, used for family-model conformance.
struct ModuleManifest {
  ModulePath path;
  std::string kind;
  std::string variant;
  std::vector<std::string> signals;
  std::vector<std::string> actions;

  bool operator==(const ModuleManifest&) const = default;
};

class AuditLog {
 public:
  void add(std::string line) { lines_.push_back(std::move(line)); }
  [[nodiscard]] const std::vector<std::string>& lines() const { return lines_; }
  std::vector<std::string> take() {
    auto out = std::move(lines_);
    lines_.clear();
    return out;
  }

 private:
  std::vector<std::string> lines_;
};

/// Read-only view handed to module logic in phase 4.
struct ScanContext {
  std::int64_t tick = 0;
  modes::MachineState state = modes::MachineState::STOPPED;
  modes::OperatingMode mode = modes::OperatingMode::Automatic;
  const IoImage* io = nullptr;
  /// Origins of unacknowledged records as of the start of the scan.
  const std::set<ModulePath>* open_errors = nullptr;
  bool estop = false;

  [[nodiscard]] bool has_open_error(const ModulePath& p) const {
    return open_errors != nullptr && open_errors->count(p) > 0;
  }
};

/// How a module reports errors. Procedural modules are bound to the template's
/// global exception list, OO modules receive a sink through a set-once slot.
class ReportBinding {
 public:
  /// Throws BuildError when already bound either way.
  void bind_template(procedural::CentralExceptionList& list);
  [[nodiscard]] oo::SinkSlot& slot() { return slot_; }
  [[nodiscard]] const oo::SinkSlot& slot() const { return slot_; }

  [[nodiscard]] bool bound() const { return list_ != nullptr || slot_.is_set(); }
  /// "FC_SetException", "ErrorSink" or "unbound".
  [[nodiscard]] std::string_view kind() const;

  /// Throws BuildError when unbound.
  errors::RecordId report(const errors::ErrorEvent& event);

 private:
  procedural::CentralExceptionList* list_ = nullptr;
  oo::SinkSlot slot_;
};

/// Node of the Unit -> EquipmentModule -> ControlModule hierarchy.
class Module {
 public:
  Module(ModulePath path, ModuleLevel level, std::string kind);
  virtual ~Module() = default;
  Module(const Module&) = delete;
  Module& operator=(const Module&) = delete;

  [[nodiscard]] const ModulePath& path() const { return path_; }
  [[nodiscard]] ModuleLevel level() const { return level_; }
  [[nodiscard]] const std::string& kind() const { return kind_; }
  [[nodiscard]] Module* parent() const { return parent_; }
  [[nodiscard]] const std::vector<std::unique_ptr<Module>>& children() const { return children_; }

  /// Throws BuildError on level violations, foreign paths and duplicates.
  Module& adopt(std::unique_ptr<Module> child);

  template <class T, class... Args>
  T& add(Args&&... args) {
    auto child = std::make_unique<T>(std::forward<Args>(args)...);
    T& ref = *child;
    adopt(std::move(child));
    return ref;
  }

  /// Phase 4: process logic plus error identification.
  virtual void evaluate(const ScanContext& ctx) = 0;
  /// Phase 6.
  virtual void write_outputs(IoImage& /*io*/) const {}
  /// Registers every signal the module owns so the image is complete at tick 0.
  virtual void declare_io(IoImage& /*io*/) const {}
  /// Drops every output, cancels jobs and motion targets.
  virtual void safe_state() {}
  [[nodiscard]] virtual bool motion_active() const { return false; }
  /// Completion report for an acting machine state.
  [[nodiscard]] virtual bool part_done(modes::MachineState /*acting*/) const { return true; }
  virtual void describe(ModuleSnapshot& /*out*/) const {}
  [[nodiscard]] virtual ModuleManifest manifest() const;

  virtual modes::CommandResult manual_output(std::string_view signal, bool value);
  virtual modes::CommandResult jog(int direction);

  /// Called by the runtime in phase 3 whenever the machine state or mode changes.
  void enter_state(modes::MachineState s);
  void enter_mode(modes::OperatingMode m);

  /// Latches a local reaction; the more drastic of old and new wins, Ignore is a no-op.
  void apply_reaction(errors::LocalAction action);
  [[nodiscard]] errors::LocalAction reaction() const { return reaction_; }

  /// Module-owned table for application-specific codes (32..63).
  void set_application_reactions(std::map<int, errors::LocalAction> table) { app_reactions_ = std::move(table); }
  [[nodiscard]] const std::map<int, errors::LocalAction>& application_reactions() const { return app_reactions_; }
  [[nodiscard]] errors::LocalAction resolve_operator_code(errors::ReactionCode code) const;

  [[nodiscard]] ReportBinding& binding() { return binding_; }
  [[nodiscard]] const ReportBinding& binding() const { return binding_; }
  void bind_audit(AuditLog& log) { audit_ = &log; }

 protected:
  errors::RecordId report(int number, errors::Severity severity, std::string cause, const ScanContext& ctx);
  void audit(std::string line) const;

  virtual void on_state_entered(modes::MachineState /*s*/) {}
  virtual void on_mode_entered(modes::OperatingMode /*m*/) {}
  virtual void on_reaction(errors::LocalAction /*action*/) {}

 private:
  ModulePath path_;
  ModuleLevel level_;
  std::string kind_;
  Module* parent_ = nullptr;
  std::vector<std::unique_ptr<Module>> children_;
  errors::LocalAction reaction_ = errors::LocalAction::Ignore;
  std::map<int, errors::LocalAction> app_reactions_;
  ReportBinding binding_;
  AuditLog* audit_ = nullptr;
};

/// Depth-first pre-order (Unit, EM, its CMs, next EM, ...).
std::vector<Module*> preorder(Module& root);
std::vector<const Module*> preorder(const Module& root);

/// Siblings under the same parent plus the parent if it is an equipment module.
std::vector<ModulePath> neighbors_of(const Module& m);

/// Rank of a local action, lower is more drastic.
int action_rank(errors::LocalAction a);

}  // namespace plcsim
