#include "plcsim/runtime/command.hpp"

namespace plcsim {

std::string_view to_string(CommandSource s) { return s == CommandSource::HMI ? "HMI" : "Scenario"; }

std::string_view command_kind(const CommandBody& body) {
  struct Visitor {
    std::string_view operator()(const cmd::EStop&) const { return "EStop"; }
    std::string_view operator()(const cmd::EStopRelease&) const { return "EStopRelease"; }
    std::string_view operator()(const cmd::Acknowledge&) const { return "Acknowledge"; }
    std::string_view operator()(const cmd::ModeSwitch&) const { return "ModeSwitch"; }
    std::string_view operator()(const cmd::ManualOutput&) const { return "ManualOutput"; }
    std::string_view operator()(const cmd::Jog&) const { return "Jog"; }
    std::string_view operator()(const cmd::InjectFault&) const { return "InjectFault"; }
    std::string_view operator()(const cmd::ClearFault&) const { return "ClearFault"; }
    std::string_view operator()(const cmd::State&) const { return "StateCommand"; }
    std::string_view operator()(const cmd::ReactionOverride&) const { return "ReactionOverride"; }
  };
  return std::visit(Visitor{}, body);
}

EnqueueResult CommandQueue::push(Command c) {
  std::lock_guard lock(mu_);
  if (items_.size() >= kCapacity) return {false, 0, "command queue full"};
  c.id = next_id_++;
  const auto id = c.id;
  items_.push_back(std::move(c));
  return {true, id, {}};
}

std::vector<Command> CommandQueue::drain() {
  std::lock_guard lock(mu_);
  std::vector<Command> out(std::make_move_iterator(items_.begin()), std::make_move_iterator(items_.end()));
  items_.clear();
  return out;
}

std::size_t CommandQueue::size() const {
  std::lock_guard lock(mu_);
  return items_.size();
}

}  // namespace plcsim
