#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "plcsim/errors/severity.hpp"
#include "plcsim/runtime/module_path.hpp"

namespace plcsim::errors {

using RecordId = std::int64_t;

/// Component-level errors live in the 1000 range, application/module-specific
/// errors in the 2000 range.
namespace numbers {
inline constexpr int kDrag = 1001;
inline constexpr int kMotorJam = 1002;
inline constexpr int kEndPositionTimeout = 1003;
inline constexpr int kBeltWorkPieceMissing = 2001;
inline constexpr int kGripperProductMissing = 2002;
inline constexpr int kEmergencyStop = 2003;
}  // namespace numbers

struct ErrorEvent {
  int number = 0;
  std::string message;
  Severity severity = Severity::Error;
  ModulePath origin;
  std::string cause;
  std::int64_t tick = 0;

  bool operator==(const ErrorEvent&) const = default;
};

enum class RecordState { Active, Acknowledged, Cleared };

std::string_view to_string(RecordState s);
std::optional<RecordState> parse_record_state(std::string_view text);

struct AckOutcome {
  bool accepted = false;
  int acknowledged = 0;
  std::string reason;
};

struct ErrorRecord {
  RecordId id = 0;
  ErrorEvent event;
  RecordState state = RecordState::Active;

  bool operator==(const ErrorRecord&) const = default;
};

}  // namespace plcsim::errors
