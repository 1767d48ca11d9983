#include "plcsim/scenario/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "plcsim/runtime/command_json.hpp"

namespace plcsim::scenario {

using nlohmann::json;

namespace {

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_motion_output(const std::string& name) {
  return ends_with(name, ".DO_Extend") || ends_with(name, ".DO_Retract") || ends_with(name, ".DO_Enable");
}

std::optional<When> parse_when(const std::string& s) {
  if (s == "at") return When::At;
  if (s == "always") return When::Always;
  if (s == "eventually") return When::Eventually;
  if (s == "final") return When::Final;
  return std::nullopt;
}

std::string_view to_string(When w) {
  switch (w) {
    case When::At: return "at";
    case When::Always: return "always";
    case When::Eventually: return "eventually";
    case When::Final: return "final";
  }
  return "final";
}

bool record_matches(const errors::ErrorRecord& r, const json& q) {
  if (q.contains("number") && r.event.number != q.at("number").get<int>()) return false;
  if (q.contains("severity") && errors::to_string(r.event.severity) != q.at("severity").get<std::string>()) return false;
  if (q.contains("origin") && r.event.origin.str() != q.at("origin").get<std::string>()) return false;
  if (q.contains("state") && errors::to_string(r.state) != q.at("state").get<std::string>()) return false;
  return true;
}

const char* const kKinds[] = {"machineState", "mode",     "error",      "noError",          "errorCount", "hasError",
                              "workpiece",    "sorted",   "noneDropped", "motionOutputsOff", "signal",     "command",
                              "audit",        "reaction", "not",        "allOf",            "anyOf"};

}  // namespace

void validate_predicate(const json& p) {
  if (!p.is_object() || p.size() != 1) throw ValidationError("predicate must be an object with exactly one key");
  const std::string key = p.begin().key();
  const json& arg = p.begin().value();
  if (std::find(std::begin(kKinds), std::end(kKinds), key) == std::end(kKinds)) {
    throw ValidationError("unknown predicate " + key);
  }
  auto need = [&](bool ok, const char* what) {
    if (!ok) throw ValidationError("predicate " + key + ": " + what);
  };
  if (key == "machineState") need(arg.is_string() && modes::parse_machine_state(arg.get<std::string>()), "unknown state");
  if (key == "mode") need(arg.is_string() && modes::parse_operating_mode(arg.get<std::string>()), "unknown mode");
  if (key == "error" || key == "noError") need(arg.is_object(), "expects an object");
  if (key == "errorCount") need(arg.is_number_integer(), "expects an integer");
  if (key == "hasError") need(arg.is_object() && arg.contains("path") && arg.contains("value"), "expects {path, value}");
  if (key == "workpiece") need(arg.is_object() && arg.contains("id"), "expects {id, ...}");
  if (key == "signal") need(arg.is_object() && arg.contains("path") && arg.contains("name") && arg.contains("equals"),
                            "expects {path, name, equals}");
  if (key == "command") need(arg.is_object() && arg.contains("kind"), "expects {kind, ...}");
  if (key == "audit") need(arg.is_string(), "expects a string");
  if (key == "reaction") {
    need(arg.is_object() && arg.contains("path") && arg.contains("equals") && arg.at("equals").is_string() &&
             errors::parse_local_action(arg.at("equals").get<std::string>()),
         "expects {path, equals: <local action>}");
  }
  if (key == "not") validate_predicate(arg);
  if (key == "allOf" || key == "anyOf") {
    need(arg.is_array(), "expects an array");
    for (const auto& q : arg) validate_predicate(q);
  }
}

bool evaluate_predicate(const json& p, const Snapshot& s, const plant::PlantConfig& config) {
  const std::string key = p.begin().key();
  const json& arg = p.begin().value();
  if (key == "machineState") return modes::to_string(s.machine_state) == arg.get<std::string>();
  if (key == "mode") return s.mode == *modes::parse_operating_mode(arg.get<std::string>());
  if (key == "error") {
    return std::any_of(s.errors.begin(), s.errors.end(), [&](const auto& r) { return record_matches(r, arg); });
  }
  if (key == "noError") {
    return std::none_of(s.errors.begin(), s.errors.end(), [&](const auto& r) { return record_matches(r, arg); });
  }
  if (key == "errorCount") return static_cast<std::int64_t>(s.errors.size()) == arg.get<std::int64_t>();
  if (key == "hasError") {
    const auto* m = s.module(ModulePath::parse(arg.at("path").get<std::string>()));
    return m && m->status.has_error == arg.at("value").get<bool>();
  }
  if (key == "workpiece") {
    const int id = arg.at("id").get<int>();
    for (const auto& w : s.plant.workpieces) {
      if (w.id != id) continue;
      if (arg.contains("location") && plant::to_string(w.location.kind) != arg.at("location").get<std::string>()) {
        return false;
      }
      if (arg.contains("ramp") &&
          (w.location.kind != plant::LocationKind::Ramp || w.location.ramp != arg.at("ramp").get<int>())) {
        return false;
      }
      if (arg.contains("stamped") && w.stamped != arg.at("stamped").get<bool>()) return false;
      if (arg.contains("notDropped") && arg.at("notDropped").get<bool>() &&
          w.location.kind == plant::LocationKind::Dropped) {
        return false;
      }
      return true;
    }
    return false;
  }
  if (key == "sorted") {
    bool all = true;
    for (const auto& w : s.plant.workpieces) {
      const bool ok = w.location.kind == plant::LocationKind::Ramp &&
                      w.location.ramp == config.ramp_for_color.at(w.color) &&
                      (w.material != plant::Material::Metal || (w.visited_stamp && w.stamped));
      all = all && ok;
    }
    return all == arg.get<bool>();
  }
  if (key == "noneDropped") {
    const bool none = std::none_of(s.plant.workpieces.begin(), s.plant.workpieces.end(),
                                   [](const auto& w) { return w.location.kind == plant::LocationKind::Dropped; });
    return none == arg.get<bool>();
  }
  if (key == "motionOutputsOff") {
    bool off = true;
    for (const auto& [name, v] : s.io.digital_outputs) {
      if (is_motion_output(name) && v) off = false;
    }
    return off == arg.get<bool>();
  }
  if (key == "signal") {
    const auto* m = s.module(ModulePath::parse(arg.at("path").get<std::string>()));
    if (!m) return false;
    auto it = m->signals.find(arg.at("name").get<std::string>());
    if (it == m->signals.end()) return false;
    const auto& want = arg.at("equals");
    return std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, bool>) return want.is_boolean() && want.get<bool>() == v;
          if constexpr (std::is_same_v<T, double>) return want.is_number() && want.get<double>() == v;
          if constexpr (std::is_same_v<T, std::string>) return want.is_string() && want.get<std::string>() == v;
        },
        it->second);
  }
  if (key == "command") {
    for (const auto& c : s.commands) {
      if (c.kind != arg.at("kind").get<std::string>()) continue;
      if (arg.contains("accepted") && c.accepted != arg.at("accepted").get<bool>()) continue;
      if (arg.contains("reason") && c.reason.find(arg.at("reason").get<std::string>()) == std::string::npos) continue;
      return true;
    }
    return false;
  }
  if (key == "audit") {
    const auto needle = arg.get<std::string>();
    return std::any_of(s.audit.begin(), s.audit.end(),
                       [&](const std::string& l) { return l.find(needle) != std::string::npos; });
  }
  if (key == "reaction") {
    const auto* m = s.module(ModulePath::parse(arg.at("path").get<std::string>()));
    return m && errors::to_string(m->reaction) == arg.at("equals").get<std::string>();
  }
  if (key == "not") return !evaluate_predicate(arg, s, config);
  if (key == "allOf") {
    return std::all_of(arg.begin(), arg.end(), [&](const json& q) { return evaluate_predicate(q, s, config); });
  }
  if (key == "anyOf") {
    return std::any_of(arg.begin(), arg.end(), [&](const json& q) { return evaluate_predicate(q, s, config); });
  }
  return false;
}

Scenario parse_scenario(const json& doc) {
  try {
    if (!doc.is_object()) throw ValidationError("scenario must be an object");
    Scenario s;
    for (const auto& [key, v] : doc.items()) {
      if (key != "name" && key != "description" && key != "plantConfig" && key != "runTicks" && key != "schedule" &&
          key != "assertions") {
        throw ValidationError("unknown scenario field " + key);
      }
    }
    s.name = doc.at("name").get<std::string>();
    if (s.name.empty()) throw ValidationError("scenario name must not be empty");
    s.description = doc.value("description", "");
    if (doc.contains("plantConfig") && doc.at("plantConfig") != "default") {
      try {
        s.plant_config = plant::PlantConfig::from_json(doc.at("plantConfig"));
        s.plant_config.validate();
      } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
      }
    }
    s.run_ticks = doc.at("runTicks").get<std::int64_t>();
    if (s.run_ticks < 0) throw ValidationError("runTicks must not be negative");

    std::int64_t last = 0;
    for (const auto& e : doc.value("schedule", json::array())) {
      ScheduleEntry entry;
      entry.tick = e.at("tick").get<std::int64_t>();
      if (entry.tick < last) throw ValidationError("schedule must be sorted by tick");
      if (entry.tick < 0 || entry.tick >= s.run_ticks) {
        throw ValidationError("schedule tick " + std::to_string(entry.tick) + " outside [0, runTicks)");
      }
      last = entry.tick;
      const bool has_cmd = e.contains("command");
      const bool has_fault = e.contains("fault");
      if (has_cmd == has_fault) throw ValidationError("schedule entry needs exactly one of command or fault");
      try {
        entry.command = has_cmd ? command_from_json(e.at("command"))
                                : CommandBody{cmd::InjectFault{plant::FaultSpec::from_json(e.at("fault"))}};
      } catch (const std::invalid_argument& ex) {
        throw ValidationError("schedule tick " + std::to_string(entry.tick) + ": " + ex.what());
      }
      s.schedule.push_back(std::move(entry));
    }

    for (const auto& a : doc.value("assertions", json::array())) {
      Assertion as;
      as.predicate = a.at("predicate");
      validate_predicate(as.predicate);
      as.label = a.value("label", as.predicate.dump());
      const auto when = parse_when(a.value("when", a.contains("tick") ? "at" : "final"));
      if (!when) throw ValidationError("unknown assertion mode " + a.at("when").dump());
      as.when = *when;
      if (a.contains("tick")) as.tick = a.at("tick").get<std::int64_t>();
      if (a.contains("from")) as.from = a.at("from").get<std::int64_t>();
      if (a.contains("until")) as.until = a.at("until").get<std::int64_t>();
      if (as.when == When::At && !as.tick) throw ValidationError("assertion '" + as.label + "' needs a tick");
      if (as.tick && (*as.tick < 1 || *as.tick > s.run_ticks)) {
        throw ValidationError("assertion '" + as.label + "' tick outside [1, runTicks]");
      }
      s.assertions.push_back(std::move(as));
    }
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return parse_scenario(doc);
}

nlohmann::ordered_json scenario_to_json(const Scenario& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  if (!s.description.empty()) j["description"] = s.description;
  j["plantConfig"] = nlohmann::ordered_json::parse(s.plant_config.to_json().dump());
  j["runTicks"] = s.run_ticks;
  auto sched = nlohmann::ordered_json::array();
  for (const auto& e : s.schedule) sched.push_back({{"tick", e.tick}, {"command", command_to_json(e.command)}});
  j["schedule"] = sched;
  auto asserts = nlohmann::ordered_json::array();
  for (const auto& a : s.assertions) {
    nlohmann::ordered_json aj;
    aj["label"] = a.label;
    aj["when"] = std::string(to_string(a.when));
    if (a.tick) aj["tick"] = *a.tick;
    if (a.from) aj["from"] = *a.from;
    if (a.until) aj["until"] = *a.until;
    aj["predicate"] = nlohmann::ordered_json::parse(a.predicate.dump());
    asserts.push_back(aj);
  }
  j["assertions"] = asserts;
  return j;
}

std::vector<std::string> list_scenarios(const std::string& dir) {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace plcsim::scenario
