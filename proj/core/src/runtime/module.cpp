#include "plcsim/runtime/module.hpp"

#include "plcsim/procedural/exception_list.hpp"
#include "plcsim/runtime/build_error.hpp"

namespace plcsim {

using errors::LocalAction;

std::string_view to_string(ModuleLevel level) {
  switch (level) {
    case ModuleLevel::Unit: return "Unit";
    case ModuleLevel::EquipmentModule: return "EquipmentModule";
    case ModuleLevel::ControlModule: return "ControlModule";
  }
  return "?";
}

const ModuleSnapshot* Snapshot::module(const ModulePath& p) const {
  for (const auto& m : modules) {
    if (m.path == p) return &m;
  }
  return nullptr;
}

void ReportBinding::bind_template(procedural::CentralExceptionList& list) {
  if (bound()) throw BuildError("error reporting already bound");
  list_ = &list;
}

std::string_view ReportBinding::kind() const {
  if (list_) return "FC_SetException";
  if (slot_.is_set()) return "ErrorSink";
  return "unbound";
}

errors::RecordId ReportBinding::report(const errors::ErrorEvent& event) {
  if (list_) return procedural::fc_set_exception(*list_, event);
  return slot_.get().add_error(event.severity, event.origin, event.cause, event.number, event.message);
}

Module::Module(ModulePath path, ModuleLevel level, std::string kind)
    : path_(std::move(path)), level_(level), kind_(std::move(kind)) {
  if (path_.empty()) throw BuildError("module path must not be empty");
}

Module& Module::adopt(std::unique_ptr<Module> child) {
  if (!child) throw BuildError("null child module");
  const auto expected_parent = child->path().parent();
  if (!expected_parent || *expected_parent != path_) {
    throw BuildError("module " + child->path().str() + " is not a child path of " + path_.str());
  }
  switch (level_) {
    case ModuleLevel::Unit:
      if (child->level() != ModuleLevel::EquipmentModule) {
        throw BuildError("unit " + path_.str() + " accepts only equipment modules");
      }
      break;
    case ModuleLevel::EquipmentModule:
      if (child->level() == ModuleLevel::Unit) throw BuildError("a unit cannot be nested in " + path_.str());
      break;
    case ModuleLevel::ControlModule:
      throw BuildError("control module " + path_.str() + " cannot have children");
  }
  for (const auto& c : children_) {
    if (c->path() == child->path()) throw BuildError("duplicate module path " + child->path().str());
  }
  child->parent_ = this;
  children_.push_back(std::move(child));
  return *children_.back();
}

ModuleManifest Module::manifest() const {
  ModuleManifest m;
  m.path = path_;
  m.kind = kind_;
  return m;
}

modes::CommandResult Module::manual_output(std::string_view signal, bool /*value*/) {
  return {false, "signal absent in variant: " + std::string(signal)};
}

modes::CommandResult Module::jog(int /*direction*/) { return {false, "not an axis"}; }

void Module::enter_state(modes::MachineState s) {
  using modes::MachineState;
  if (s == MachineState::CLEARING || s == MachineState::RESETTING) reaction_ = LocalAction::Ignore;
  if (s == MachineState::UNHOLDING && reaction_ == LocalAction::Hold) reaction_ = LocalAction::Ignore;
  if (s == MachineState::UNSUSPENDING && reaction_ == LocalAction::Suspend) reaction_ = LocalAction::Ignore;
  on_state_entered(s);
}

void Module::enter_mode(modes::OperatingMode m) { on_mode_entered(m); }

int action_rank(LocalAction a) {
  switch (a) {
    case LocalAction::AbortNow: return 0;
    case LocalAction::StopEndOfCycle: return 1;
    case LocalAction::FinishCycle: return 2;
    case LocalAction::Hold: return 3;
    case LocalAction::Suspend: return 4;
    case LocalAction::Ignore: return 100;
  }
  return 100;
}

void Module::apply_reaction(LocalAction action) {
  if (action == LocalAction::Ignore) return;
  if (action_rank(action) < action_rank(reaction_)) reaction_ = action;
  on_reaction(action);
}

LocalAction Module::resolve_operator_code(errors::ReactionCode code) const {
  if (code.is_standard()) return errors::standard_action_for(code);
  auto it = app_reactions_.find(code.value());
  return it == app_reactions_.end() ? LocalAction::Ignore : it->second;
}

errors::RecordId Module::report(int number, errors::Severity severity, std::string cause, const ScanContext& ctx) {
  errors::ErrorEvent ev;
  ev.number = number;
  ev.severity = severity;
  ev.origin = path_;
  ev.cause = std::move(cause);
  ev.tick = ctx.tick;
  return binding_.report(ev);
}

void Module::audit(std::string line) const {
  if (audit_) audit_->add(path_.str() + ": " + line);
}

namespace {
template <class M, class Out>
void walk(M& m, Out& out) {
  out.push_back(&m);
  for (const auto& c : m.children()) walk(static_cast<M&>(*c), out);
}
}  // namespace

std::vector<Module*> preorder(Module& root) {
  std::vector<Module*> out;
  walk(root, out);
  return out;
}

std::vector<const Module*> preorder(const Module& root) {
  std::vector<const Module*> out;
  walk(root, out);
  return out;
}

std::vector<ModulePath> neighbors_of(const Module& m) {
  std::vector<ModulePath> out;
  const Module* p = m.parent();
  if (!p) return out;
  for (const auto& s : p->children()) {
    if (s.get() != &m) out.push_back(s->path());
  }
  if (p->level() == ModuleLevel::EquipmentModule) out.push_back(p->path());
  return out;
}

}  // namespace plcsim
