#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plcsim/errors/catalog.hpp"
#include "plcsim/errors/error_event.hpp"

namespace plcsim::procedural {

/// The template's machine-wide exception list.
///
/// A plain aggregate that every module receives by reference. Nothing stops a
/// module from touching `records` directly; modules are only supposed to call
/// fc_set_exception. The HMI reads the list verbatim.
struct CentralExceptionList {
  std::vector<errors::ErrorRecord> records;
  errors::RecordId next_id = 1;
  const errors::ErrorCatalog* catalog = nullptr;
  std::vector<std::string> audit;
};

/// Appends an Active record and returns its id. While a record with the same
/// (origin, number) is still Active the existing id is returned instead.
/// Uncataloged numbers are stored with severity Error and an audit entry.
errors::RecordId fc_set_exception(CentralExceptionList& list, const errors::ErrorEvent& event);

using errors::AckOutcome;

/// Acknowledges one record, or every Active record when `id` is empty.
AckOutcome fc_acknowledge(CentralExceptionList& list, std::optional<errors::RecordId> id);

/// Moves Acknowledged records to Cleared.
void fc_clear_acknowledged(CentralExceptionList& list);

/// Records that are not Cleared, in insertion order.
std::vector<errors::ErrorRecord> fc_active_records(const CentralExceptionList& list);

}  // namespace plcsim::procedural
