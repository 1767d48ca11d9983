#include "plcsim/actuators/axis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace plcsim::actuators {

std::string_view to_string(MotionKind m) { return m == MotionKind::Rotary ? "Rotary" : "Linear"; }

std::optional<MotionKind> parse_motion_kind(std::string_view text) {
  if (text == "Rotary") return MotionKind::Rotary;
  if (text == "Linear") return MotionKind::Linear;
  return std::nullopt;
}

std::string_view to_string(FeedbackKind f) {
  switch (f) {
    case FeedbackKind::Potentiometer: return "Potentiometer";
    case FeedbackKind::IncrementalEncoder: return "IncrementalEncoder";
    case FeedbackKind::AbsoluteEncoder: return "AbsoluteEncoder";
  }
  return "?";
}

std::optional<FeedbackKind> parse_feedback_kind(std::string_view text) {
  if (text == "Potentiometer") return FeedbackKind::Potentiometer;
  if (text == "IncrementalEncoder") return FeedbackKind::IncrementalEncoder;
  if (text == "AbsoluteEncoder") return FeedbackKind::AbsoluteEncoder;
  return std::nullopt;
}

void AxisConfig::validate() const {
  if (limits && !(limits->negative_limit < limits->positive_limit)) {
    throw std::invalid_argument("axis limits require NegativeLimit < PositiveLimit");
  }
  if (!(max_speed > 0.0)) throw std::invalid_argument("axis maxSpeed must be positive");
  if (drag_tolerance_units < 0.0) throw std::invalid_argument("axis dragToleranceUnits must not be negative");
  if (drag_tolerance_ticks <= 0) throw std::invalid_argument("axis dragToleranceTicks must be positive");
}

namespace {
double scale_of(FeedbackKind kind) {
  switch (kind) {
    case FeedbackKind::AbsoluteEncoder: return 4096.0;
    case FeedbackKind::IncrementalEncoder: return 1024.0;
    case FeedbackKind::Potentiometer: return 0.125;
  }
  return 1.0;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}
}  // namespace

double encode_feedback(FeedbackKind kind, double position) { return position * scale_of(kind); }
double decode_feedback(FeedbackKind kind, double raw) { return raw / scale_of(kind); }

std::string_view to_string(AxisState s) {
  switch (s) {
    case AxisState::Idle: return "Idle";
    case AxisState::Moving: return "Moving";
    case AxisState::Jogging: return "Jogging";
    case AxisState::Faulted: return "Faulted";
  }
  return "?";
}

AxisModule::AxisModule(ModulePath path, AxisConfig config)
    : Module(std::move(path), ModuleLevel::ControlModule, "Axis"), config_(config) {
  config_.validate();
}

double AxisModule::clamp(double pos) const {
  if (!config_.limits) return pos;
  return std::clamp(pos, config_.limits->negative_limit, config_.limits->positive_limit);
}

bool AxisModule::in_position(double pos) const {
  return !target_ && direction_ == 0 && reference_ == pos && actual_ == pos;
}

modes::CommandResult AxisModule::move_to(double target) {
  if (faulted()) return {false, "faulted"};
  const double t = clamp(target);
  if (t != target) audit("clamped move_to(" + fmt(target) + ") to " + fmt(t));
  target_ = t;
  direction_ = 0;
  state_ = AxisState::Moving;
  return {true, {}};
}

modes::CommandResult AxisModule::run_endless(int direction) {
  if (direction < -1 || direction > 1) return {false, "direction must be -1, 0 or +1"};
  if (faulted()) return {false, "faulted"};
  target_.reset();
  direction_ = direction;
  state_ = direction == 0 ? AxisState::Idle : AxisState::Jogging;
  return {true, {}};
}

void AxisModule::stop() {
  target_.reset();
  direction_ = 0;
  if (state_ != AxisState::Faulted) state_ = AxisState::Idle;
}

void AxisModule::fault(int number, errors::Severity severity, std::string cause, const ScanContext& ctx) {
  report(number, severity, std::move(cause), ctx);
  state_ = AxisState::Faulted;
  target_.reset();
  direction_ = 0;
  reference_ = actual_;
  drag_count_ = 0;
  jam_count_ = 0;
}

void AxisModule::evaluate(const ScanContext& ctx) {
  const double previous_actual = actual_;
  actual_ = decode_feedback(config_.feedback, ctx.io->ai(signal_name(path(), "FeedbackRaw")));
  if (!homed_) {
    // The drive powers up holding wherever the mechanics are.
    reference_ = actual_;
    homed_ = true;
    return;
  }

  if (state_ == AxisState::Faulted) {
    reference_ = actual_;
    was_enabled_ = false;
    reference_moved_ = false;
    if (ctx.has_open_error(path())) return;
    state_ = AxisState::Idle;
  }

  // Diagnosis looks at what the previous scan commanded.
  if (was_enabled_ && std::abs(reference_ - actual_) > config_.drag_tolerance_units) {
    ++drag_count_;
  } else {
    drag_count_ = 0;
  }
  if (reference_moved_ && actual_ == previous_actual) {
    ++jam_count_;
  } else {
    jam_count_ = 0;
  }
  if (jam_count_ >= config_.drag_tolerance_ticks) {
    fault(errors::numbers::kMotorJam, errors::Severity::Malfunction,
          "actual position unchanged for " + std::to_string(jam_count_) + " ticks while reference moves", ctx);
  } else if (drag_count_ >= config_.drag_tolerance_ticks) {
    fault(errors::numbers::kDrag, errors::Severity::Malfunction,
          "deviation between reference and actual position exceeded " + fmt(config_.drag_tolerance_units) +
              " for " + std::to_string(drag_count_) + " ticks",
          ctx);
  }
  if (faulted()) {
    was_enabled_ = false;
    reference_moved_ = false;
    return;
  }

  const double before = reference_;
  if (state_ == AxisState::Moving && target_) {
    const double step = std::clamp(*target_ - reference_, -config_.max_speed, config_.max_speed);
    reference_ = clamp(reference_ + step);
    if (reference_ == *target_ && actual_ == *target_) {
      target_.reset();
      state_ = AxisState::Idle;
    }
  } else if (state_ == AxisState::Jogging) {
    reference_ = clamp(reference_ + direction_ * config_.max_speed);
  }
  reference_moved_ = reference_ != before;
  was_enabled_ = enabled();
}

void AxisModule::write_outputs(IoImage& io) const {
  io.digital_outputs[signal_name(path(), "DO_Enable")] = enabled();
  io.analog_outputs[signal_name(path(), "ReferencePosition")] = reference_;
}

void AxisModule::declare_io(IoImage& io) const {
  write_outputs(io);
  io.analog_inputs[signal_name(path(), "FeedbackRaw")] = encode_feedback(config_.feedback, actual_);
}

void AxisModule::describe(ModuleSnapshot& out) const {
  out.signals["DO_Enable"] = enabled();
  out.signals["ReferencePosition"] = reference_;
  out.signals["ActualPosition"] = actual_;
  out.signals["State"] = std::string(to_string(state_));
  out.axis = AxisView{config_, reference_, actual_, std::string(to_string(state_))};
}

ModuleManifest AxisModule::manifest() const {
  ModuleManifest m = Module::manifest();
  m.variant = std::string(to_string(config_.motion)) + (config_.limited() ? "Limited" : "Unlimited");
  m.signals = {"DO_Enable", "ReferencePosition", "FeedbackRaw"};
  m.actions = {"ACT_MoveTo", "ACT_Jog", "ACT_Stop"};
  return m;
}

modes::CommandResult AxisModule::manual_output(std::string_view signal, bool value) {
  if (signal == "DO_Enable" && !value) {
    stop();
    return {true, {}};
  }
  if (signal == "DO_Enable") return {false, "axis enable follows motion commands; use Jog"};
  return Module::manual_output(signal, value);
}

void AxisModule::on_reaction(errors::LocalAction action) {
  if (action == errors::LocalAction::AbortNow) stop();
}

}  // namespace plcsim::actuators
