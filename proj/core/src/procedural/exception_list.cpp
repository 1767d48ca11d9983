#include "plcsim/procedural/exception_list.hpp"

namespace plcsim::procedural {

using errors::ErrorRecord;
using errors::RecordId;
using errors::RecordState;

RecordId fc_set_exception(CentralExceptionList& list, const errors::ErrorEvent& event) {
  for (const auto& r : list.records) {
    if (r.state == RecordState::Active && r.event.origin == event.origin && r.event.number == event.number) {
      return r.id;
    }
  }
  ErrorRecord rec;
  rec.id = list.next_id++;
  rec.event = event;
  rec.state = RecordState::Active;
  const auto* entry = list.catalog ? list.catalog->find(event.number) : nullptr;
  if (entry) {
    rec.event.severity = entry->severity;
    if (rec.event.message.empty()) rec.event.message = entry->message;
  } else {
    rec.event.severity = errors::Severity::Error;
    list.audit.push_back("uncataloged error number " + std::to_string(event.number) + " from " +
                         event.origin.str());
  }
  list.records.push_back(std::move(rec));
  return list.records.back().id;
}

AckOutcome fc_acknowledge(CentralExceptionList& list, std::optional<RecordId> id) {
  AckOutcome out;
  if (!id) {
    for (auto& r : list.records) {
      if (r.state == RecordState::Active) {
        r.state = RecordState::Acknowledged;
        ++out.acknowledged;
      }
    }
    out.accepted = true;
    return out;
  }
  for (auto& r : list.records) {
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

void fc_clear_acknowledged(CentralExceptionList& list) {
  for (auto& r : list.records) {
    if (r.state == RecordState::Acknowledged) r.state = RecordState::Cleared;
  }
}

std::vector<ErrorRecord> fc_active_records(const CentralExceptionList& list) {
  std::vector<ErrorRecord> out;
  for (const auto& r : list.records) {
    if (r.state != RecordState::Cleared) out.push_back(r);
  }
  return out;
}

}  // namespace plcsim::procedural
