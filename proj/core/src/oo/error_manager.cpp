#include "plcsim/oo/error_manager.hpp"

namespace plcsim::oo {

using errors::ErrorRecord;
using errors::RecordId;
using errors::RecordState;

RecordId ErrorManager::add_error(errors::Severity severity, const ModulePath& origin, std::string_view cause,
                                 int number, std::string_view message) {
  ++dispatches_;
  for (const auto& r : records_) {
    if (r.state == RecordState::Active && r.event.origin == origin && r.event.number == number) return r.id;
  }
  ErrorRecord rec;
  rec.id = next_id_++;
  rec.event.number = number;
  rec.event.message = std::string(message);
  rec.event.severity = severity;
  rec.event.origin = origin;
  rec.event.cause = std::string(cause);
  rec.event.tick = tick_;
  if (const auto* entry = catalog_->find(number)) {
    rec.event.severity = entry->severity;
    if (rec.event.message.empty()) rec.event.message = entry->message;
  } else {
    rec.event.severity = errors::Severity::Error;
    audit("uncataloged error number " + std::to_string(number) + " from " + origin.str());
  }
  records_.push_back(rec);
  on_record_added(records_.back());
  return rec.id;
}

NeighborStatus ErrorManager::status_of(const ModulePath& path) const {
  NeighborStatus s;
  for (const auto& r : records_) {
    if (r.state != RecordState::Active || !path.contains(r.event.origin)) continue;
    s.has_error = true;
    if (!s.severity_max || r.event.severity > *s.severity_max) s.severity_max = r.event.severity;
  }
  return s;
}

AckOutcome ErrorManager::acknowledge(std::optional<RecordId> id) {
  AckOutcome out;
  if (!id) {
    for (auto& r : records_) {
      if (r.state == RecordState::Active) {
        r.state = RecordState::Acknowledged;
        ++out.acknowledged;
      }
    }
    out.accepted = true;
    return out;
  }
  for (auto& r : records_) {
    if (r.id != *id) continue;
    if (r.state != RecordState::Active) {
      out.reason = "record " + std::to_string(*id) + " is not active";
      return out;
    }
    r.state = RecordState::Acknowledged;
    out.accepted = true;
    out.acknowledged = 1;
    return out;
  }
  out.reason = "unknown record " + std::to_string(*id);
  return out;
}

void ErrorManager::clear_acknowledged() {
  for (auto& r : records_) {
    if (r.state == RecordState::Acknowledged) r.state = RecordState::Cleared;
  }
}

std::vector<ErrorRecord> ErrorManager::published() const {
  std::vector<ErrorRecord> out;
  for (const auto& r : records_) {
    if (r.state != RecordState::Cleared) out.push_back(r);
  }
  return out;
}

std::vector<ErrorRecord> ErrorManager::published_since(RecordId watermark) const {
  std::vector<ErrorRecord> out;
  for (const auto& r : records_) {
    if (r.id > watermark) out.push_back(r);
  }
  return out;
}

std::vector<std::string> ErrorManager::take_audit() {
  auto out = std::move(audit_);
  audit_.clear();
  return out;
}

std::vector<ErrorRecord> ExtendedErrorManager::published_at_least(errors::Severity min) const {
  std::vector<ErrorRecord> out;
  for (auto& r : published()) {
    if (r.event.severity >= min) out.push_back(r);
  }
  return out;
}

void ExtendedErrorManager::on_record_added(const ErrorRecord& record) {
  channel_.push_back("record " + std::to_string(record.id) + " number " + std::to_string(record.event.number) +
                     " " + std::string(errors::to_string(record.event.severity)) + " at " +
                     record.event.origin.str());
}

}  // namespace plcsim::oo
