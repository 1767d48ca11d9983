#include "plcsim/runtime/runtime.hpp"

#include <algorithm>
#include <stdexcept>

#include "plcsim/procedural/procedural_strategy.hpp"
#include "plcsim/runtime/build_error.hpp"

namespace plcsim {

using modes::MachineState;
using modes::OperatingMode;
using modes::StateCommand;

std::string_view to_string(StrategyKind k) { return k == StrategyKind::Procedural ? "procedural" : "oo"; }

std::optional<StrategyKind> parse_strategy_kind(std::string_view text) {
  if (text == "procedural" || text == "Procedural") return StrategyKind::Procedural;
  if (text == "oo" || text == "OO") return StrategyKind::OO;
  return std::nullopt;
}

namespace {

actuators::CylinderParams cylinder_params(const plant::PlantConfig& config, const std::string& rel) {
  auto it = config.cylinder_kinds.find(rel);
  if (it == config.cylinder_kinds.end()) throw BuildError("no actuator kind configured for " + rel);
  const auto kind = actuators::parse_cylinder_kind(it->second);
  if (!kind) throw BuildError("unknown actuator kind '" + it->second + "' for " + rel);
  return actuators::CylinderParams{*kind, config.travel_ticks, config.timeout_ticks};
}

bool is_abort_family(MachineState s) {
  return s == MachineState::ABORTING || s == MachineState::ABORTED || s == MachineState::CLEARING;
}

}  // namespace

std::unique_ptr<Runtime> build_runtime(const plant::PlantConfig& config, RuntimeOptions options) {
  if (config.equipment.empty()) throw BuildError("unit requires at least one equipment module");
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw BuildError(e.what());
  }
  return std::unique_ptr<Runtime>(new Runtime(config, std::move(options)));
}

Runtime::Runtime(plant::PlantConfig config, RuntimeOptions options)
    : config_(std::move(config)),
      catalog_(options.catalog ? options.catalog : &errors::default_catalog()),
      period_ms_(options.period_ms) {
  if (period_ms_ <= 0) throw BuildError("scan period must be positive");
  const ModulePath unit_path = ModulePath::parse(config_.unit_name);
  unit_ = std::make_unique<plant::XppuUnit>(unit_path, plant::UnitLayout::from(config_));

  plant::StackModule* stack = nullptr;
  plant::CraneModule* crane = nullptr;
  plant::StampModule* stamp = nullptr;
  plant::SortingConveyorModule* conveyor = nullptr;
  for (const auto& em : config_.equipment) {
    const ModulePath p = unit_path.child(em);
    if (em == "Stack") {
      stack = &unit_->add<plant::StackModule>(p, cylinder_params(config_, "Stack/Pusher"));
    } else if (em == "Crane") {
      crane = &unit_->add<plant::CraneModule>(p, config_.crane_axis, cylinder_params(config_, "Crane/Lift"),
                                              config_.grip_dwell_ticks, config_.stack_angle);
    } else if (em == "Stamp") {
      stamp = &unit_->add<plant::StampModule>(p, cylinder_params(config_, "Stamp/Press"), config_.stamp_cycle_ticks);
    } else if (em == "SortingConveyor") {
      std::vector<actuators::CylinderParams> seps;
      for (std::size_t i = 0; i < config_.separator_positions.size(); ++i) {
        seps.push_back(cylinder_params(config_, "SortingConveyor/Separator" + std::to_string(i + 1)));
      }
      conveyor = &unit_->add<plant::SortingConveyorModule>(p, config_, seps);
    } else {
      throw BuildError("unknown equipment module " + em);
    }
  }
  unit_->attach(stack, crane, stamp, conveyor);

  order_ = preorder(static_cast<Module&>(*unit_));
  std::map<std::string, actuators::CylinderKind> kinds;
  for (Module* m : order_) {
    m->bind_audit(audit_);
    if (auto it = config_.application_reactions.find(m->path().leaf());
        it != config_.application_reactions.end() && m->level() == ModuleLevel::EquipmentModule) {
      m->set_application_reactions(it->second);
    }
    if (auto* cyl = dynamic_cast<actuators::CylinderModule*>(m)) kinds[m->path().str()] = cyl->cylinder_kind();
  }

  if (options.strategy == StrategyKind::Procedural) {
    strategy_ = std::make_unique<procedural::ProceduralStrategy>(*catalog_, std::move(options.matrix));
  } else {
    strategy_ = std::make_unique<oo::OoStrategy>(*catalog_, options.manager);
  }
  strategy_->bind(*unit_);

  plant_ = std::make_unique<plant::Plant>(config_, kinds);
  for (Module* m : order_) m->declare_io(io_);
  build_snapshot();
}

EnqueueResult Runtime::enqueue(CommandBody body, CommandSource source) {
  return queue_.push(Command{std::move(body), source, 0});
}

Module* Runtime::find(const ModulePath& path) {
  for (Module* m : order_) {
    if (m->path() == path) return m;
  }
  return nullptr;
}

std::vector<ModulePath> Runtime::module_paths() const {
  std::vector<ModulePath> out;
  for (const Module* m : order_) out.push_back(m->path());
  return out;
}

std::vector<ModuleManifest> Runtime::manifests() const {
  std::vector<ModuleManifest> out;
  for (const Module* m : order_) out.push_back(m->manifest());
  return out;
}

void Runtime::sync_state() {
  const MachineState s = machine_.state();
  if (s != notified_state_) {
    notified_state_ = s;
    for (Module* m : order_) m->enter_state(s);
  }
}

bool Runtime::axes_within_limits() const {
  for (const Module* m : order_) {
    if (const auto* ax = dynamic_cast<const actuators::AxisModule*>(m)) {
      const auto& lim = ax->config().limits;
      if (lim && (ax->actual() < lim->negative_limit || ax->actual() > lim->positive_limit)) return false;
    }
  }
  return true;
}

modes::ModeGateInputs Runtime::gate_inputs() const {
  modes::ModeGateInputs in;
  in.state = machine_.state();
  for (const auto& r : strategy_->active_list()) {
    if (r.state == errors::RecordState::Active) in.open_error = true;
  }
  const auto gate = strategy_->recover();
  in.recovery_blocked = !gate.open;
  in.recovery_reason = gate.reason;
  in.axes_within_limits = axes_within_limits();
  in.faults_active = plant_->any_fault_active(tick_ + 1);
  return in;
}

void Runtime::resolve_mode() {
  if (!modes_.pending()) return;
  const OperatingMode before = modes_.current();
  const auto in = gate_inputs();
  const auto decision = modes_.resolve(in);
  CommandOutcome out = pending_mode_.value_or(CommandOutcome{});
  pending_mode_.reset();
  out.accepted = decision->accepted;
  if (!decision->accepted) {
    out.reason = decision->reason;
    if (decision->reason == "recovery pending") out.reason += ": " + in.recovery_reason;
    audit_.add("mode " + std::string(modes::to_string(decision->requested)) + " rejected: " + out.reason);
  } else if (decision->requested == OperatingMode::Automatic && before != OperatingMode::Automatic &&
             strategy_->recovery_pending()) {
    strategy_->recovery_done();
    audit_.add("recovery complete");
  }
  if (out.id != 0) outcomes_.push_back(out);
}

CommandOutcome Runtime::apply(const Command& c) {
  CommandOutcome out{c.id, c.source, std::string(command_kind(c.body)), true, {}};
  auto reject = [&](std::string reason) {
    out.accepted = false;
    out.reason = std::move(reason);
  };
  const std::int64_t t = tick_ + 1;
  const OperatingMode mode = modes_.current();

  std::visit(
      [&](const auto& body) {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, cmd::EStop>) {
          plant_->press_estop();
        } else if constexpr (std::is_same_v<T, cmd::EStopRelease>) {
          plant_->release_estop();
        } else if constexpr (std::is_same_v<T, cmd::Acknowledge>) {
          const auto ack = strategy_->acknowledge(body.id);
          if (!ack.accepted) reject(ack.reason);
        } else if constexpr (std::is_same_v<T, cmd::ModeSwitch>) {
          modes_.request(body.mode);
        } else if constexpr (std::is_same_v<T, cmd::ManualOutput>) {
          Module* m = find(body.path);
          if (!m) {
            reject("unknown module " + body.path.str());
          } else if (mode != OperatingMode::Manual && mode != OperatingMode::Jog) {
            reject("rejected: wrong mode");
          } else {
            const auto r = m->manual_output(body.signal, body.value);
            if (!r.accepted) reject(r.reason);
          }
        } else if constexpr (std::is_same_v<T, cmd::Jog>) {
          Module* m = find(body.path);
          if (!m) {
            reject("unknown module " + body.path.str());
          } else if (mode != OperatingMode::Jog) {
            reject("rejected: wrong mode");
          } else {
            const auto r = m->jog(body.direction);
            if (!r.accepted) reject(r.reason);
          }
        } else if constexpr (std::is_same_v<T, cmd::InjectFault>) {
          const auto r = plant_->inject(body.spec, t);
          if (!r.accepted) reject(r.reason);
        } else if constexpr (std::is_same_v<T, cmd::ClearFault>) {
          const auto r = plant_->clear(body.id);
          if (!r.accepted) reject(r.reason);
        } else if constexpr (std::is_same_v<T, cmd::State>) {
          const bool estop = plant_->estop_pressed();
          if (body.command == StateCommand::Start && mode != OperatingMode::Automatic) {
            reject("start requires automatic mode");
          } else if (body.command == StateCommand::Start && strategy_->recovery_pending()) {
            reject("recovery pending");
          } else if (estop && (body.command == StateCommand::Start || body.command == StateCommand::Clear ||
                               body.command == StateCommand::Reset)) {
            reject("emergency stop active");
          } else {
            const auto r = machine_.command(body.command, t);
            if (!r.accepted) reject(r.reason);
            sync_state();
          }
        } else if constexpr (std::is_same_v<T, cmd::ReactionOverride>) {
          if (body.code < 0 || body.code >= errors::ReactionCode::kWidth) {
            reject("reaction code out of range");
          } else {
            const auto r = strategy_->operator_override(errors::ReactionCode(body.code));
            if (!r.accepted) reject(r.reason);
          }
        }
      },
      c.body);

  if (!out.accepted) audit_.add(out.kind + " " + out.reason);
  return out;
}

const Snapshot& Runtime::scan() {
  const std::int64_t t = tick_ + 1;
  outcomes_.clear();
  deliveries_.clear();
  strategy_->begin_scan(t);

  // 1: commands
  for (const auto& c : queue_.drain()) {
    if (std::holds_alternative<cmd::ModeSwitch>(c.body)) {
      if (pending_mode_) {
        pending_mode_->reason = "superseded by a later mode request";
        audit_.add("ModeSwitch " + pending_mode_->reason);
        outcomes_.push_back(*pending_mode_);
      }
      pending_mode_ = CommandOutcome{c.id, c.source, "ModeSwitch", false, {}};
      modes_.request(std::get<cmd::ModeSwitch>(c.body).mode);
      continue;
    }
    outcomes_.push_back(apply(c));
  }

  // 2: inputs
  plant_->latch_inputs(io_, t);

  // 3: machine state and mode
  const bool estop = io_.di(signal_name(unit_->path(), "DI_EStop"));
  if (estop && machine_.state() != MachineState::ABORTING && machine_.state() != MachineState::ABORTED &&
      machine_.state() != MachineState::CLEARING) {
    machine_.command(StateCommand::Abort, t);
    audit_.add("emergency stop: abort");
  }
  machine_.tick(reports_, t);
  sync_state();
  resolve_mode();
  if (modes_.current() != notified_mode_) {
    notified_mode_ = modes_.current();
    for (Module* m : order_) m->enter_mode(notified_mode_);
  }
  strategy_->observe(machine_.state(), modes_.current());
  if (machine_.state() == MachineState::CLEARING || machine_.state() == MachineState::RESETTING) {
    strategy_->clear_acknowledged();
  }

  // 4: module logic
  std::set<ModulePath> open;
  for (const auto& r : strategy_->active_list()) {
    if (r.state == errors::RecordState::Active) open.insert(r.event.origin);
  }
  ScanContext ctx{t, machine_.state(), modes_.current(), &io_, &open, estop};
  for (Module* m : order_) m->evaluate(ctx);

  // 5: reaction
  auto result = strategy_->react(*unit_, ctx);
  deliveries_ = std::move(result.reports);
  if (result.command) {
    const auto r = machine_.command(*result.command, t);
    audit_.add("reaction " + std::string(modes::to_string(*result.command)) +
               (r.accepted ? std::string(" accepted") : ": " + r.reason));
    sync_state();
  }
  const MachineState s = machine_.state();
  if (is_abort_family(s) || estop) {
    for (Module* m : order_) m->safe_state();
  }
  reports_ = modes::PartReports{s, true};
  if (modes::is_acting(s)) {
    for (const Module* m : order_) {
      if (!m->part_done(s)) reports_.all_done = false;
      if (s == MachineState::ABORTING && m->motion_active()) reports_.all_done = false;
    }
  }

  // 6: outputs
  for (const Module* m : order_) m->write_outputs(io_);

  // 7: plant
  plant_->step(io_, t);

  // 8: snapshot
  tick_ = t;
  build_snapshot();
  return snapshot_;
}

std::vector<Snapshot> Runtime::run(std::int64_t n) {
  std::vector<Snapshot> out;
  for (std::int64_t i = 0; i < n; ++i) out.push_back(scan());
  return out;
}

void Runtime::build_snapshot() {
  Snapshot s;
  s.tick = tick_;
  s.machine_state = machine_.state();
  s.mode = modes_.current();
  s.io = io_;
  s.errors = strategy_->active_list();
  s.plant = plant_->view(tick_);
  s.strategy = std::string(strategy_->name());
  s.commands = outcomes_;
  for (const Module* m : order_) {
    ModuleSnapshot ms;
    ms.path = m->path();
    ms.level = m->level();
    ms.kind = m->kind();
    ms.reaction = m->reaction();
    ms.reporting = std::string(m->binding().kind());
    ms.status.motion_active = m->motion_active();
    for (const auto& r : s.errors) {
      if (r.event.origin != m->path()) continue;
      if (r.state == errors::RecordState::Active) ms.status.has_error = true;
      ms.status.last_error_number = r.event.number;
    }
    m->describe(ms);
    s.modules.push_back(std::move(ms));
  }
  s.audit = audit_.take();
  for (auto& l : strategy_->take_audit()) s.audit.push_back(std::move(l));
  snapshot_ = std::move(s);
}

}  // namespace plcsim
