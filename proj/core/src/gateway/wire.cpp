#include "plcsim/gateway/wire.hpp"

#include <nlohmann/json.hpp>

#include "plcsim/runtime/command_json.hpp"

namespace plcsim::wire {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr std::pair<IconHint, std::string_view> kHints[] = {{IconHint::RotaryLimited, "RotaryLimited"},
                                                            {IconHint::RotaryUnlimited, "RotaryUnlimited"},
                                                            {IconHint::LinearLimited, "LinearLimited"},
                                                            {IconHint::LinearUnlimited, "LinearUnlimited"}};

[[noreturn]] void fail(const std::string& what) { throw ProtocolError(what); }

template <class T>
T as(const json& j, const char* key) {
  if (!j.contains(key)) fail(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(std::string("field '") + key + "' has the wrong type");
  }
}

std::uint64_t command_id_of(const json& j) {
  if (!j.contains("commandId")) fail("missing field 'commandId'");
  if (!j.at("commandId").is_number_unsigned()) fail("field 'commandId' must be a non-negative integer");
  return j.at("commandId").get<std::uint64_t>();
}

template <class E>
E parse_or_fail(std::optional<E> v, const char* what, const json& raw) {
  if (!v) fail(std::string("unknown ") + what + " " + raw.dump());
  return *v;
}

ojson axis_config_to_json(const actuators::AxisConfig& c) {
  ojson j;
  j["motion"] = std::string(actuators::to_string(c.motion));
  if (c.limits) {
    j["range"] = ojson{{"negativeLimit", c.limits->negative_limit}, {"positiveLimit", c.limits->positive_limit}};
  } else {
    j["range"] = "Unlimited";
  }
  j["feedback"] = std::string(actuators::to_string(c.feedback));
  j["maxSpeed"] = c.max_speed;
  j["dragToleranceUnits"] = c.drag_tolerance_units;
  j["dragToleranceTicks"] = c.drag_tolerance_ticks;
  return j;
}

actuators::AxisConfig axis_config_from_json(const json& j) {
  actuators::AxisConfig c;
  c.motion = parse_or_fail(actuators::parse_motion_kind(as<std::string>(j, "motion")), "motion", j.at("motion"));
  const auto& range = j.at("range");
  if (range.is_string()) {
    if (range.get<std::string>() != "Unlimited") fail("unknown axis range " + range.dump());
  } else {
    c.limits = actuators::AxisLimits{as<double>(range, "negativeLimit"), as<double>(range, "positiveLimit")};
  }
  c.feedback =
      parse_or_fail(actuators::parse_feedback_kind(as<std::string>(j, "feedback")), "feedback", j.at("feedback"));
  c.max_speed = as<double>(j, "maxSpeed");
  c.drag_tolerance_units = as<double>(j, "dragToleranceUnits");
  c.drag_tolerance_ticks = as<int>(j, "dragToleranceTicks");
  return c;
}

ojson signal_to_json(const SignalValue& v) {
  return std::visit([](const auto& x) { return ojson(x); }, v);
}

SignalValue signal_from_json(const json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  fail("signal value must be a boolean, number or string");
}

ojson record_to_json(const errors::ErrorRecord& r) {
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

errors::ErrorRecord record_from_json(const json& j) {
  errors::ErrorRecord r;
  r.id = as<errors::RecordId>(j, "id");
  r.event.number = as<int>(j, "number");
  r.event.severity = parse_or_fail(errors::parse_severity(as<std::string>(j, "severity")), "severity", j.at("severity"));
  try {
    r.event.origin = ModulePath::parse(as<std::string>(j, "origin"));
  } catch (const std::invalid_argument& e) {
    fail(std::string("origin: ") + e.what());
  }
  r.event.message = as<std::string>(j, "message");
  r.event.cause = as<std::string>(j, "cause");
  r.event.tick = as<std::int64_t>(j, "tick");
  r.state = parse_or_fail(errors::parse_record_state(as<std::string>(j, "state")), "record state", j.at("state"));
  return r;
}

ojson module_to_json(const ModuleStatusEntry& m) {
  ojson j;
  j["path"] = m.path.str();
  j["kind"] = m.kind;
  j["status"] = ojson{{"hasError", m.status.has_error},
                      {"lastErrorNumber", m.status.last_error_number ? ojson(*m.status.last_error_number) : ojson()},
                      {"motionActive", m.status.motion_active}};
  ojson sig = ojson::object();
  for (const auto& [k, v] : m.signals) sig[k] = signal_to_json(v);
  j["signals"] = sig;
  if (m.axis) {
    j["axis"] = ojson{{"config", axis_config_to_json(m.axis->config)},
                      {"referencePosition", m.axis->reference_position},
                      {"actualPosition", m.axis->actual_position},
                      {"state", m.axis->state},
                      {"iconHint", std::string(to_string(m.axis->icon))}};
  }
  return j;
}

ModuleStatusEntry module_from_json(const json& j) {
  ModuleStatusEntry m;
  try {
    m.path = ModulePath::parse(as<std::string>(j, "path"));
  } catch (const std::invalid_argument& e) {
    fail(std::string("path: ") + e.what());
  }
  m.kind = as<std::string>(j, "kind");
  const auto& st = j.at("status");
  m.status.has_error = as<bool>(st, "hasError");
  if (st.contains("lastErrorNumber") && !st.at("lastErrorNumber").is_null()) {
    m.status.last_error_number = as<int>(st, "lastErrorNumber");
  }
  m.status.motion_active = as<bool>(st, "motionActive");
  for (const auto& [k, v] : j.at("signals").items()) m.signals[k] = signal_from_json(v);
  if (j.contains("axis")) {
    const auto& a = j.at("axis");
    AxisStatus ax;
    ax.config = axis_config_from_json(a.at("config"));
    ax.reference_position = as<double>(a, "referencePosition");
    ax.actual_position = as<double>(a, "actualPosition");
    ax.state = as<std::string>(a, "state");
    ax.icon = parse_or_fail(parse_icon_hint(as<std::string>(a, "iconHint")), "icon hint", a.at("iconHint"));
    m.axis = ax;
  }
  return m;
}

json parse_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    fail(std::string("not JSON: ") + e.what());
  }
  if (!j.is_object()) fail("message must be an object");
  if (!j.contains("v") || j.at("v") != kVersion) fail("unsupported or missing version");
  return j;
}

}  // namespace

std::string_view to_string(IconHint h) {
  for (const auto& [v, name] : kHints) {
    if (v == h) return name;
  }
  return "RotaryLimited";
}

std::optional<IconHint> parse_icon_hint(std::string_view text) {
  for (const auto& [v, name] : kHints) {
    if (name == text) return v;
  }
  return std::nullopt;
}

IconHint axis_icon_hint(const actuators::AxisConfig& config) {
  const bool rotary = config.motion == actuators::MotionKind::Rotary;
  if (config.limited()) return rotary ? IconHint::RotaryLimited : IconHint::LinearLimited;
  return rotary ? IconHint::RotaryUnlimited : IconHint::LinearUnlimited;
}

bool allowed_on_wire(const CommandBody& body) {
  return !std::holds_alternative<cmd::InjectFault>(body) && !std::holds_alternative<cmd::ClearFault>(body);
}

StatusMessage status_from(const Snapshot& s) {
  StatusMessage m;
  m.tick = s.tick;
  m.machine_state = s.machine_state;
  m.mode = s.mode;
  for (const auto& ms : s.modules) {
    ModuleStatusEntry e;
    e.path = ms.path;
    e.kind = ms.kind;
    e.status = ms.status;
    e.signals = ms.signals;
    if (ms.axis) {
      e.axis = AxisStatus{ms.axis->config, ms.axis->reference_position, ms.axis->actual_position, ms.axis->state,
                          axis_icon_hint(ms.axis->config)};
    }
    m.modules.push_back(std::move(e));
  }
  return m;
}

ErrorsMessage errors_from(const Snapshot& s) { return {s.tick, s.errors}; }

std::string encode(const Message& m) {
  ojson j;
  j["v"] = std::string(kVersion);
  std::visit(
      [&](const auto& msg) {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, StatusMessage>) {
          j["type"] = "Status";
          j["tick"] = msg.tick;
          j["machineState"] = std::string(modes::to_string(msg.machine_state));
          j["mode"] = std::string(modes::to_string(msg.mode));
          ojson mods = ojson::array();
          for (const auto& e : msg.modules) mods.push_back(module_to_json(e));
          j["modules"] = mods;
        } else if constexpr (std::is_same_v<T, ErrorsMessage>) {
          j["type"] = "Errors";
          j["tick"] = msg.tick;
          ojson recs = ojson::array();
          for (const auto& r : msg.records) recs.push_back(record_to_json(r));
          j["records"] = recs;
        } else {
          j["type"] = "Ack";
          j["commandId"] = msg.command_id;
          j["accepted"] = msg.accepted;
          if (msg.reason) j["reason"] = *msg.reason;
        }
      },
      m);
  return j.dump();
}

std::string encode(const WireCommand& c) {
  ojson j;
  j["v"] = std::string(kVersion);
  j["type"] = "Command";
  j["commandId"] = c.command_id;
  j["command"] = command_to_json(c.command);
  return j.dump();
}

Message decode_message(std::string_view line) {
  const json j = parse_line(line);
  const auto type = as<std::string>(j, "type");
  try {
    if (type == "Status") {
      StatusMessage m;
      m.tick = as<std::int64_t>(j, "tick");
      m.machine_state = parse_or_fail(modes::parse_machine_state(as<std::string>(j, "machineState")), "machine state",
                                      j.at("machineState"));
      m.mode = parse_or_fail(modes::parse_operating_mode(as<std::string>(j, "mode")), "mode", j.at("mode"));
      for (const auto& e : j.at("modules")) m.modules.push_back(module_from_json(e));
      return m;
    }
    if (type == "Errors") {
      ErrorsMessage m;
      m.tick = as<std::int64_t>(j, "tick");
      for (const auto& r : j.at("records")) m.records.push_back(record_from_json(r));
      return m;
    }
    if (type == "Ack") {
      AckMessage m;
      m.command_id = command_id_of(j);
      m.accepted = as<bool>(j, "accepted");
      if (j.contains("reason")) m.reason = as<std::string>(j, "reason");
      return m;
    }
  } catch (const json::exception& e) {
    fail(type + ": " + e.what());
  }
  fail("unknown message type " + type);
}

WireCommand decode_command(std::string_view line) {
  const json j = parse_line(line);
  if (as<std::string>(j, "type") != "Command") fail("expected a Command message");
  WireCommand c;
  c.command_id = command_id_of(j);
  if (!j.contains("command")) fail("missing field 'command'");
  try {
    c.command = command_from_json(j.at("command"));
  } catch (const std::invalid_argument& e) {
    throw InvalidCommand(c.command_id, e.what());
  } catch (const json::exception& e) {
    throw InvalidCommand(c.command_id, e.what());
  }
  return c;
}

}  // namespace plcsim::wire
