#include <array>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "plcsim/errors/catalog.hpp"
#include "plcsim/errors/error_event.hpp"
#include "plcsim/errors/reaction.hpp"
#include "plcsim/errors/severity.hpp"

namespace plcsim::errors {

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::Message: return "Message";
    case Severity::Warning: return "Warning";
    case Severity::Malfunction: return "Malfunction";
    case Severity::Error: return "Error";
  }
  return "Error";
}

std::optional<Severity> parse_severity(std::string_view text) {
  for (auto s : {Severity::Message, Severity::Warning, Severity::Malfunction, Severity::Error}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

ReactionCode::ReactionCode(int value) : value_(value) {
  if (value < 0 || value >= kWidth) {
    throw std::out_of_range("reaction code " + std::to_string(value) + " outside [0, 63]");
  }
}

std::string_view to_string(LocalAction a) {
  switch (a) {
    case LocalAction::Ignore: return "Ignore";
    case LocalAction::AbortNow: return "AbortNow";
    case LocalAction::StopEndOfCycle: return "StopEndOfCycle";
    case LocalAction::Hold: return "Hold";
    case LocalAction::Suspend: return "Suspend";
    case LocalAction::FinishCycle: return "FinishCycle";
  }
  return "Ignore";
}

std::optional<LocalAction> parse_local_action(std::string_view text) {
  for (auto a : {LocalAction::Ignore, LocalAction::AbortNow, LocalAction::StopEndOfCycle, LocalAction::Hold,
                 LocalAction::Suspend, LocalAction::FinishCycle}) {
    if (to_string(a) == text) return a;
  }
  return std::nullopt;
}

ReactionCode default_reaction_for(Severity severity) {
  switch (severity) {
    case Severity::Message:
    case Severity::Warning: return ReactionCode::none();
    case Severity::Malfunction: return ReactionCode::stop_controlled();
    case Severity::Error: return ReactionCode::abort_immediate();
  }
  return ReactionCode::none();
}

LocalAction standard_action_for(ReactionCode code) {
  switch (code.value()) {
    case 1: return LocalAction::AbortNow;
    case 2: return LocalAction::StopEndOfCycle;
    case 3: return LocalAction::Hold;
    case 4: return LocalAction::Suspend;
    case 5: return LocalAction::FinishCycle;
    default: return LocalAction::Ignore;
  }
}

int reaction_priority(ReactionCode code) {
  // abort < stop < finish cycle < hold < suspend < application codes < reserved < none
  static constexpr std::array<int, 6> standard{100, 0, 1, 3, 4, 2};
  if (code.is_none()) return 100;
  if (code.is_standard()) return standard[static_cast<std::size_t>(code.value())];
  if (code.is_application_specific()) return 10 + code.value();
  return 80 + code.value();
}

std::string_view to_string(RecordState s) {
  switch (s) {
    case RecordState::Active: return "Active";
    case RecordState::Acknowledged: return "Acknowledged";
    case RecordState::Cleared: return "Cleared";
  }
  return "Active";
}

std::optional<RecordState> parse_record_state(std::string_view text) {
  for (auto s : {RecordState::Active, RecordState::Acknowledged, RecordState::Cleared}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

ErrorCatalog::ErrorCatalog(std::vector<CatalogEntry> entries) {
  for (auto& e : entries) {
    auto number = e.number;
    if (!entries_.emplace(number, std::move(e)).second) {
      throw std::runtime_error("duplicate catalog number " + std::to_string(number));
    }
  }
}

ErrorCatalog ErrorCatalog::from_json(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("error catalog: ") + e.what());
  }
  if (!doc.is_array()) throw std::runtime_error("error catalog: top level must be an array");
  std::vector<CatalogEntry> entries;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("number") || !item.contains("severity")) {
      throw std::runtime_error("error catalog: each entry needs number and severity");
    }
    CatalogEntry e;
    try {
      e.number = item.at("number").get<int>();
      e.message = item.value("message", std::string{});
      auto sev = parse_severity(item.at("severity").get<std::string>());
      if (!sev) throw std::runtime_error("unknown severity for " + std::to_string(e.number));
      e.severity = *sev;
      if (item.contains("reactionOverride") && !item.at("reactionOverride").is_null()) {
        e.reaction_override = ReactionCode(item.at("reactionOverride").get<int>());
      }
    } catch (const std::exception& ex) {
      throw std::runtime_error(std::string("error catalog: ") + ex.what());
    }
    entries.push_back(std::move(e));
  }
  return ErrorCatalog(std::move(entries));
}

ErrorCatalog ErrorCatalog::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open error catalog " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string ErrorCatalog::to_json() const {
  auto doc = nlohmann::ordered_json::array();
  for (const auto& [number, e] : entries_) {
    nlohmann::ordered_json item;
    item["number"] = e.number;
    item["message"] = e.message;
    item["severity"] = std::string(to_string(e.severity));
    if (e.reaction_override) item["reactionOverride"] = e.reaction_override->value();
    doc.push_back(std::move(item));
  }
  return doc.dump(2);
}

const CatalogEntry* ErrorCatalog::find(int number) const {
  auto it = entries_.find(number);
  return it == entries_.end() ? nullptr : &it->second;
}

Severity ErrorCatalog::severity_of(int number) const {
  const auto* e = find(number);
  return e ? e->severity : Severity::Error;
}

ReactionCode ErrorCatalog::reaction_for(int number) const {
  const auto* e = find(number);
  if (!e) return default_reaction_for(Severity::Error);
  return e->reaction_override ? *e->reaction_override : default_reaction_for(e->severity);
}

std::vector<CatalogEntry> ErrorCatalog::entries() const {
  std::vector<CatalogEntry> out;
  out.reserve(entries_.size());
  for (const auto& [n, e] : entries_) out.push_back(e);
  return out;
}

const ErrorCatalog& default_catalog() {
  static const ErrorCatalog catalog({
      {numbers::kDrag, "Drag error: deviation between reference and actual position", Severity::Malfunction, {}},
      {numbers::kMotorJam, "Motor jam: actual position frozen while reference moves", Severity::Malfunction, {}},
      {numbers::kEndPositionTimeout, "Cylinder end position not reached in time", Severity::Malfunction, {}},
      {numbers::kBeltWorkPieceMissing, "Work piece expected but not registered on the belt", Severity::Warning, {}},
      {numbers::kGripperProductMissing, "Gripper product sensor not triggered", Severity::Error, {}},
      {numbers::kEmergencyStop, "Emergency stop actuated", Severity::Error, {}},
  });
  return catalog;
}

}  // namespace plcsim::errors
