#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "plcsim/runtime/snapshot.hpp"

namespace plcsim {

using ojson = nlohmann::ordered_json;

/// First line of every trace file.
ojson trace_header(std::string_view scenario, std::string_view strategy);

/// One trace line. Keys keep a fixed order so traces compare byte-for-byte.
ojson snapshot_to_json(const Snapshot& s);
std::string trace_line(const Snapshot& s);

/// Keeps tick, machineState, mode, plant positions, DO signals and the error
/// set as (number, severity, origin). Everything strategy-internal is dropped.
ojson behavioral_projection(const ojson& line);

}  // namespace plcsim
