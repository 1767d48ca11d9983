#pragma once

#include <compare>
#include <optional>
#include <string_view>

#include "plcsim/errors/severity.hpp"

namespace plcsim::errors {

/// Machine-wide reaction code in [0, 63].
///   0      none
///   1      abort immediately
///   2      controlled stop
///   3      hold
///   4      suspend
///   5      finish cycle, no restart
///   6..31  reserved
///   32..63 application specific
class ReactionCode {
 public:
  static constexpr int kWidth = 64;

  constexpr ReactionCode() = default;
  /// Throws std::out_of_range outside [0, 63].
  explicit ReactionCode(int value);

  [[nodiscard]] constexpr int value() const { return value_; }
  [[nodiscard]] constexpr bool is_none() const { return value_ == 0; }
  [[nodiscard]] constexpr bool is_standard() const { return value_ >= 1 && value_ <= 5; }
  [[nodiscard]] constexpr bool is_application_specific() const { return value_ >= 32; }

  auto operator<=>(const ReactionCode&) const = default;

  static ReactionCode none() { return ReactionCode(0); }
  static ReactionCode abort_immediate() { return ReactionCode(1); }
  static ReactionCode stop_controlled() { return ReactionCode(2); }
  static ReactionCode hold() { return ReactionCode(3); }
  static ReactionCode suspend() { return ReactionCode(4); }
  static ReactionCode finish_cycle_no_restart() { return ReactionCode(5); }

 private:
  int value_ = 0;
};

/// What a single module does with a reaction delivered to it.
enum class LocalAction { Ignore, AbortNow, StopEndOfCycle, Hold, Suspend, FinishCycle };

std::string_view to_string(LocalAction a);
std::optional<LocalAction> parse_local_action(std::string_view text);

/// Message, Warning -> none; Malfunction -> controlled stop; Error -> abort immediately.
ReactionCode default_reaction_for(Severity severity);

/// Local action for the standard codes 1..5; Ignore for everything else.
LocalAction standard_action_for(ReactionCode code);

/// Ranks codes so that the most drastic standard reaction wins when several
/// records demand one in the same scan. Lower rank = more drastic.
int reaction_priority(ReactionCode code);

}  // namespace plcsim::errors
