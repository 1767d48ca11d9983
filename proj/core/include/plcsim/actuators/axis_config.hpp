#pragma once

#include <optional>
#include <string_view>

namespace plcsim::actuators {

enum class MotionKind { Rotary, Linear };
enum class FeedbackKind { Potentiometer, IncrementalEncoder, AbsoluteEncoder };

std::string_view to_string(MotionKind m);
std::optional<MotionKind> parse_motion_kind(std::string_view text);
std::string_view to_string(FeedbackKind f);
std::optional<FeedbackKind> parse_feedback_kind(std::string_view text);

struct AxisLimits {
  double negative_limit = 0.0;
  double positive_limit = 0.0;

  bool operator==(const AxisLimits&) const = default;
};

/// Configuration of a servo axis. Positions are degrees for rotary axes and
/// millimeters for linear ones. An empty `limits` means an unlimited range.
struct AxisConfig {
  MotionKind motion = MotionKind::Rotary;
  std::optional<AxisLimits> limits;
  FeedbackKind feedback = FeedbackKind::AbsoluteEncoder;
  /// Units per scan.
  double max_speed = 5.0;
  double drag_tolerance_units = 10.0;
  int drag_tolerance_ticks = 5;

  [[nodiscard]] bool limited() const { return limits.has_value(); }
  /// Throws std::invalid_argument when the configuration is inconsistent.
  void validate() const;

  bool operator==(const AxisConfig&) const = default;
};

/// Raw feedback value the drive reports for a position. All scales are powers
/// of two, so encode/decode is exact and the feedback type stays invisible
/// above the axis.
double encode_feedback(FeedbackKind kind, double position);
double decode_feedback(FeedbackKind kind, double raw);

}  // namespace plcsim::actuators
