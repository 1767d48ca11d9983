#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "plcsim/runtime/runtime.hpp"
#include "plcsim/runtime/trace.hpp"
#include "plcsim/scenario/runner.hpp"
#include "plcsim/scenario/scenario.hpp"

namespace plcsim::test {

inline const std::vector<std::string>& bundled_scenarios() {
  static const std::vector<std::string> names{
      "nominal_sort_6wp",   "fig1_estop_recovery", "belt_wp_lost_warning", "gripper_sensor_error_standstill",
      "drag_fault_crane",   "reaction32_targeting", "stop_vs_abort_grace",
  };
  return names;
}

inline std::string scenario_path(const std::string& name) {
  return std::string(PLCSIM_TEST_SCENARIO_DIR) + "/" + name + ".json";
}

inline scenario::Scenario load(const std::string& name) { return scenario::load_scenario(scenario_path(name)); }

inline RuntimeOptions options_for(StrategyKind kind, oo::ManagerKind manager = oo::ManagerKind::Base) {
  RuntimeOptions o;
  o.strategy = kind;
  o.manager = manager;
  return o;
}

/// Runs a scenario and hands every snapshot to `each`.
inline scenario::RunReport run(const scenario::Scenario& s, RuntimeOptions rt,
                               const std::function<void(const Snapshot&)>& each = {}) {
  scenario::RunOptions opts;
  opts.runtime = rt;
  if (each) opts.observer = [&](const Runtime&, const Snapshot& snap) { each(snap); };
  return scenario::run_scenario(s, std::move(opts));
}

inline scenario::RunReport run(const std::string& name, StrategyKind kind,
                               const std::function<void(const Snapshot&)>& each = {}) {
  return run(load(name), options_for(kind), each);
}

/// Builds a scenario in code: Reset at 0, Start at 20, then `extra`.
inline scenario::Scenario nominal_with(std::int64_t ticks, std::vector<scenario::ScheduleEntry> extra = {}) {
  scenario::Scenario s;
  s.name = "generated";
  s.run_ticks = ticks;
  s.schedule.push_back({0, cmd::State{modes::StateCommand::Reset}});
  s.schedule.push_back({20, cmd::State{modes::StateCommand::Start}});
  for (auto& e : extra) s.schedule.push_back(std::move(e));
  std::stable_sort(s.schedule.begin(), s.schedule.end(),
                   [](const auto& a, const auto& b) { return a.tick < b.tick; });
  return s;
}

inline bool is_motion_output(const std::string& name) {
  auto ends = [&](std::string_view suffix) {
    return name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return ends(".DO_Extend") || ends(".DO_Retract") || ends(".DO_Enable");
}

inline bool motion_outputs_off(const Snapshot& s) {
  for (const auto& [name, value] : s.io.digital_outputs) {
    if (is_motion_output(name) && value) return false;
  }
  return true;
}

inline const plant::WorkPiece* wp(const Snapshot& s, int id) {
  for (const auto& w : s.plant.workpieces) {
    if (w.id == id) return &w;
  }
  return nullptr;
}

inline plant::FaultSpec fault(std::string id, plant::FaultKind kind, std::string target) {
  plant::FaultSpec f;
  f.id = std::move(id);
  f.kind = kind;
  if (!target.empty()) f.target = ModulePath::parse(target);
  return f;
}

}  // namespace plcsim::test
