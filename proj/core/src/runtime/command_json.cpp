#include "plcsim/runtime/command_json.hpp"

#include <stdexcept>

namespace plcsim {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

const json& field(const json& j, const char* key) {
  if (!j.contains(key)) throw std::invalid_argument(std::string("command misses field '") + key + "'");
  return j.at(key);
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const json::type_error&) {
    throw std::invalid_argument(std::string("command field '") + key + "' has the wrong type");
  }
}

ModulePath path_of(const json& j) {
  try {
    return ModulePath::parse(get<std::string>(j, "path"));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("command field 'path': ") + e.what());
  }
}

}  // namespace

ojson command_to_json(const CommandBody& body) {
  ojson j;
  j["kind"] = std::string(command_kind(body));
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, cmd::Acknowledge>) {
          if (b.id) j["errorId"] = *b.id;
        } else if constexpr (std::is_same_v<T, cmd::ModeSwitch>) {
          j["mode"] = std::string(modes::to_string(b.mode));
        } else if constexpr (std::is_same_v<T, cmd::ManualOutput>) {
          j["path"] = b.path.str();
          j["signal"] = b.signal;
          j["value"] = b.value;
        } else if constexpr (std::is_same_v<T, cmd::Jog>) {
          j["path"] = b.path.str();
          j["direction"] = b.direction;
        } else if constexpr (std::is_same_v<T, cmd::InjectFault>) {
          j["fault"] = ojson::parse(b.spec.to_json().dump());
        } else if constexpr (std::is_same_v<T, cmd::ClearFault>) {
          j["faultId"] = b.id;
        } else if constexpr (std::is_same_v<T, cmd::State>) {
          j["command"] = std::string(modes::to_string(b.command));
        } else if constexpr (std::is_same_v<T, cmd::ReactionOverride>) {
          j["code"] = b.code;
        }
      },
      body);
  return j;
}

CommandBody command_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("command must be an object");
  const auto kind = get<std::string>(j, "kind");
  if (kind == "EStop") return cmd::EStop{};
  if (kind == "EStopRelease") return cmd::EStopRelease{};
  if (kind == "Acknowledge") {
    cmd::Acknowledge a;
    if (j.contains("errorId") && !j.at("errorId").is_null()) a.id = get<errors::RecordId>(j, "errorId");
    return a;
  }
  if (kind == "ModeSwitch") {
    const auto m = modes::parse_operating_mode(get<std::string>(j, "mode"));
    if (!m) throw std::invalid_argument("unknown mode " + j.at("mode").dump());
    return cmd::ModeSwitch{*m};
  }
  if (kind == "ManualOutput") {
    return cmd::ManualOutput{path_of(j), get<std::string>(j, "signal"), get<bool>(j, "value")};
  }
  if (kind == "Jog") {
    const int d = get<int>(j, "direction");
    return cmd::Jog{path_of(j), d};
  }
  if (kind == "InjectFault") return cmd::InjectFault{plant::FaultSpec::from_json(field(j, "fault"))};
  if (kind == "ClearFault") return cmd::ClearFault{get<std::string>(j, "faultId")};
  if (kind == "StateCommand") {
    const auto c = modes::parse_state_command(get<std::string>(j, "command"));
    if (!c) throw std::invalid_argument("unknown state command " + j.at("command").dump());
    return cmd::State{*c};
  }
  if (kind == "ReactionOverride") return cmd::ReactionOverride{get<int>(j, "code")};
  throw std::invalid_argument("unknown command kind " + kind);
}

}  // namespace plcsim
