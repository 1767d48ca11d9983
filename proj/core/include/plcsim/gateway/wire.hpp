#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "plcsim/actuators/axis_config.hpp"
#include "plcsim/errors/error_event.hpp"
#include "plcsim/runtime/command.hpp"
#include "plcsim/runtime/snapshot.hpp"

namespace plcsim::wire {

inline constexpr std::string_view kVersion = "v1";

enum class IconHint { RotaryLimited, RotaryUnlimited, LinearLimited, LinearUnlimited };
std::string_view to_string(IconHint h);
std::optional<IconHint> parse_icon_hint(std::string_view text);

IconHint axis_icon_hint(const actuators::AxisConfig& config);

struct AxisStatus {
  actuators::AxisConfig config;
  double reference_position = 0.0;
  double actual_position = 0.0;
  std::string state;
  IconHint icon = IconHint::RotaryLimited;

  bool operator==(const AxisStatus&) const = default;
};

struct ModuleStatusEntry {
  ModulePath path;
  std::string kind;
  ModuleStatus status;
  std::map<std::string, SignalValue> signals;
  std::optional<AxisStatus> axis;

  bool operator==(const ModuleStatusEntry&) const = default;
};

struct StatusMessage {
  std::int64_t tick = 0;
  modes::MachineState machine_state = modes::MachineState::STOPPED;
  modes::OperatingMode mode = modes::OperatingMode::Automatic;
  std::vector<ModuleStatusEntry> modules;

  bool operator==(const StatusMessage&) const = default;
};

struct ErrorsMessage {
  std::int64_t tick = 0;
  std::vector<errors::ErrorRecord> records;

  bool operator==(const ErrorsMessage&) const = default;
};

struct AckMessage {
  std::uint64_t command_id = 0;
  bool accepted = false;
  std::optional<std::string> reason;

  bool operator==(const AckMessage&) const = default;
};

/// Server to client.
using Message = std::variant<StatusMessage, ErrorsMessage, AckMessage>;

/// Client to server. InjectFault and ClearFault are scenario-only.
struct WireCommand {
  std::uint64_t command_id = 0;
  CommandBody command;

  bool operator==(const WireCommand&) const = default;
};

/// Malformed input; a gateway drops the client that sent it.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed envelope around a command body that does not parse. The
/// sender gets a rejected Ack and stays connected.
class InvalidCommand : public ProtocolError {
 public:
  InvalidCommand(std::uint64_t id, const std::string& what) : ProtocolError(what), command_id(id) {}
  std::uint64_t command_id;
};

[[nodiscard]] bool allowed_on_wire(const CommandBody& body);

StatusMessage status_from(const Snapshot& s);
ErrorsMessage errors_from(const Snapshot& s);

/// One line of JSON without the trailing newline.
std::string encode(const Message& m);
std::string encode(const WireCommand& c);
/// Throw ProtocolError.
Message decode_message(std::string_view line);
WireCommand decode_command(std::string_view line);

}  // namespace plcsim::wire
