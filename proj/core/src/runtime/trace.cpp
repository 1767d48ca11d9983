#include "plcsim/runtime/trace.hpp"

#include <set>
#include <tuple>

namespace plcsim {

namespace {

ojson signal_to_json(const SignalValue& v) {
  return std::visit([](const auto& x) { return ojson(x); }, v);
}

ojson axis_config_json(const actuators::AxisConfig& c) {
  ojson j;
  j["motion"] = std::string(to_string(c.motion));
  if (c.limits) {
    j["range"] = ojson{{"negativeLimit", c.limits->negative_limit}, {"positiveLimit", c.limits->positive_limit}};
  } else {
    j["range"] = "Unlimited";
  }
  j["feedback"] = std::string(to_string(c.feedback));
  j["maxSpeed"] = c.max_speed;
  j["dragToleranceUnits"] = c.drag_tolerance_units;
  j["dragToleranceTicks"] = c.drag_tolerance_ticks;
  return j;
}

ojson record_json(const errors::ErrorRecord& r) {
  ojson j;
  j["id"] = r.id;
  j["number"] = r.event.number;
  j["severity"] = std::string(errors::to_string(r.event.severity));
  j["origin"] = r.event.origin.str();
  j["message"] = r.event.message;
  j["cause"] = r.event.cause;
  j["tick"] = r.event.tick;
  j["state"] = std::string(errors::to_string(r.state));
  return j;
}

ojson workpiece_json(const plant::WorkPiece& w) {
  ojson j;
  j["id"] = w.id;
  j["material"] = std::string(plant::to_string(w.material));
  j["color"] = std::string(plant::to_string(w.color));
  ojson loc;
  loc["kind"] = std::string(plant::to_string(w.location.kind));
  if (w.location.kind == plant::LocationKind::Belt) loc["position"] = w.location.belt_position;
  if (w.location.kind == plant::LocationKind::Ramp) loc["ramp"] = w.location.ramp;
  j["location"] = loc;
  j["stamped"] = w.stamped;
  j["visitedStamp"] = w.visited_stamp;
  return j;
}

}  // namespace

ojson trace_header(std::string_view scenario, std::string_view strategy) {
  ojson j;
  j["format"] = "plcsim-trace";
  j["version"] = 1;
  j["scenario"] = std::string(scenario);
  j["strategy"] = std::string(strategy);
  return j;
}

ojson snapshot_to_json(const Snapshot& s) {
  ojson j;
  j["tick"] = s.tick;
  j["machineState"] = std::string(modes::to_string(s.machine_state));
  j["mode"] = std::string(modes::to_string(s.mode));

  ojson errs = ojson::array();
  for (const auto& r : s.errors) errs.push_back(record_json(r));
  j["errors"] = errs;

  ojson mods = ojson::object();
  for (const auto& m : s.modules) {
    ojson mj;
    mj["level"] = std::string(to_string(m.level));
    mj["kind"] = m.kind;
    mj["hasError"] = m.status.has_error;
    mj["lastErrorNumber"] = m.status.last_error_number ? ojson(*m.status.last_error_number) : ojson(nullptr);
    mj["motionActive"] = m.status.motion_active;
    mj["reaction"] = std::string(errors::to_string(m.reaction));
    mj["reporting"] = m.reporting;
    ojson sig = ojson::object();
    for (const auto& [k, v] : m.signals) sig[k] = signal_to_json(v);
    mj["signals"] = sig;
    if (m.axis) {
      mj["axis"] = ojson{{"config", axis_config_json(m.axis->config)},
                         {"referencePosition", m.axis->reference_position},
                         {"actualPosition", m.axis->actual_position},
                         {"state", m.axis->state}};
    }
    mods[m.path.str()] = mj;
  }
  j["moduleStatus"] = mods;

  ojson io;
  io["digitalOutputs"] = s.io.digital_outputs;
  io["digitalInputs"] = s.io.digital_inputs;
  io["analogOutputs"] = s.io.analog_outputs;
  // Raw feedback is device-specific; the axis view carries the decoded position.
  ojson analog_in = ojson::object();
  for (const auto& [name, value] : s.io.analog_inputs) {
    if (!name.ends_with(".FeedbackRaw")) analog_in[name] = value;
  }
  io["analogInputs"] = analog_in;
  j["io"] = io;

  ojson p;
  ojson wps = ojson::array();
  for (const auto& w : s.plant.workpieces) wps.push_back(workpiece_json(w));
  p["workpieces"] = wps;
  p["cylinders"] = s.plant.cylinders;
  p["axes"] = s.plant.axes;
  p["vacuumHolding"] = s.plant.vacuum_holding;
  p["estopPressed"] = s.plant.estop_pressed;
  p["activeFaults"] = s.plant.active_faults;
  j["plant"] = p;

  j["audit"] = s.audit;
  ojson cmds = ojson::array();
  for (const auto& c : s.commands) {
    ojson cj;
    cj["id"] = c.id;
    cj["source"] = std::string(to_string(c.source));
    cj["kind"] = c.kind;
    cj["accepted"] = c.accepted;
    if (!c.reason.empty()) cj["reason"] = c.reason;
    cmds.push_back(cj);
  }
  j["commands"] = cmds;
  return j;
}

std::string trace_line(const Snapshot& s) { return snapshot_to_json(s).dump(); }

ojson behavioral_projection(const ojson& line) {
  ojson j;
  j["tick"] = line.at("tick");
  j["machineState"] = line.at("machineState");
  j["mode"] = line.at("mode");
  const auto& p = line.at("plant");
  j["plant"] = ojson{{"workpieces", p.at("workpieces")}, {"cylinders", p.at("cylinders")}, {"axes", p.at("axes")}};
  j["digitalOutputs"] = line.at("io").at("digitalOutputs");
  std::set<std::tuple<int, std::string, std::string>> set;
  for (const auto& r : line.at("errors")) {
    set.emplace(r.at("number").get<int>(), r.at("severity").get<std::string>(), r.at("origin").get<std::string>());
  }
  ojson errs = ojson::array();
  for (const auto& [n, sev, origin] : set) errs.push_back(ojson{{"number", n}, {"severity", sev}, {"origin", origin}});
  j["errors"] = errs;
  return j;
}

}  // namespace plcsim
