#pragma once

#include <nlohmann/json.hpp>

#include "plcsim/runtime/command.hpp"

namespace plcsim {

/// {"kind": "ManualOutput", "path": ..., "signal": ..., "value": ...} and friends.
/// Shared by scenario files and the wire protocol.
nlohmann::ordered_json command_to_json(const CommandBody& body);
/// Throws std::invalid_argument naming the offending field.
CommandBody command_from_json(const nlohmann::json& j);

}  // namespace plcsim
