#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "plcsim/errors/error_event.hpp"
#include "plcsim/modes/machine.hpp"
#include "plcsim/modes/mode_manager.hpp"
#include "plcsim/plant/fault.hpp"
#include "plcsim/runtime/module_path.hpp"

namespace plcsim {

enum class CommandSource { HMI, Scenario };
std::string_view to_string(CommandSource s);

namespace cmd {
struct EStop {
  bool operator==(const EStop&) const = default;
};
struct EStopRelease {
  bool operator==(const EStopRelease&) const = default;
};
/// Empty id acknowledges every Active record.
struct Acknowledge {
  std::optional<errors::RecordId> id;
  bool operator==(const Acknowledge&) const = default;
};
struct ModeSwitch {
  modes::OperatingMode mode = modes::OperatingMode::Automatic;
  bool operator==(const ModeSwitch&) const = default;
};
struct ManualOutput {
  ModulePath path;
  std::string signal;
  bool value = false;
  bool operator==(const ManualOutput&) const = default;
};
struct Jog {
  ModulePath path;
  int direction = 0;
  bool operator==(const Jog&) const = default;
};
struct InjectFault {
  plant::FaultSpec spec;
  bool operator==(const InjectFault&) const = default;
};
struct ClearFault {
  std::string id;
  bool operator==(const ClearFault&) const = default;
};
struct State {
  modes::StateCommand command = modes::StateCommand::Start;
  bool operator==(const State&) const = default;
};
struct ReactionOverride {
  int code = 0;
  bool operator==(const ReactionOverride&) const = default;
};
}  // namespace cmd

using CommandBody = std::variant<cmd::EStop, cmd::EStopRelease, cmd::Acknowledge, cmd::ModeSwitch, cmd::ManualOutput,
                                 cmd::Jog, cmd::InjectFault, cmd::ClearFault, cmd::State, cmd::ReactionOverride>;

/// "EStop", "Acknowledge", ... as used in scenario files and on the wire.
std::string_view command_kind(const CommandBody& body);

struct Command {
  CommandBody body;
  CommandSource source = CommandSource::Scenario;
  /// Assigned by the queue.
  std::uint64_t id = 0;
};

/// Result of applying a command at the start of a scan.
struct CommandOutcome {
  std::uint64_t id = 0;
  CommandSource source = CommandSource::Scenario;
  std::string kind;
  bool accepted = false;
  std::string reason;

  bool operator==(const CommandOutcome&) const = default;
};

struct EnqueueResult {
  bool accepted = false;
  std::uint64_t id = 0;
  std::string reason;
};

/// Bounded multi-producer queue drained by the scan thread. A full queue
/// rejects instead of blocking.
class CommandQueue {
 public:
  static constexpr std::size_t kCapacity = 1024;

  EnqueueResult push(Command c);
  std::vector<Command> drain();
  [[nodiscard]] std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::deque<Command> items_;
  std::uint64_t next_id_ = 1;
};

}  // namespace plcsim
