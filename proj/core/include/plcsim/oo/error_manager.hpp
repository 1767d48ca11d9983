#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plcsim/errors/catalog.hpp"
#include "plcsim/errors/error_event.hpp"
#include "plcsim/oo/error_sink.hpp"

namespace plcsim::oo {

using errors::AckOutcome;

/// Central error management block. Modules only ever see it as an ErrorSink;
/// the record store is private and leaves the manager only as copies.
class ErrorManager : public ErrorSink, public NeighborStatusQuery {
 public:
  explicit ErrorManager(const errors::ErrorCatalog& catalog) : catalog_(&catalog) {}
  ErrorManager(const ErrorManager&) = delete;
  ErrorManager& operator=(const ErrorManager&) = delete;

  errors::RecordId add_error(errors::Severity severity, const ModulePath& origin, std::string_view cause, int number,
                             std::string_view message) final;

  [[nodiscard]] NeighborStatus status_of(const ModulePath& path) const override;

  /// Stamps records added during the current scan.
  void set_tick(std::int64_t tick) { tick_ = tick; }

  AckOutcome acknowledge(std::optional<errors::RecordId> id);
  void clear_acknowledged();

  /// Copy of every record that is not Cleared, in insertion order.
  [[nodiscard]] std::vector<errors::ErrorRecord> published() const;
  /// Records created after `watermark` (ids are monotonic).
  [[nodiscard]] std::vector<errors::ErrorRecord> published_since(errors::RecordId watermark) const;
  [[nodiscard]] errors::RecordId last_id() const { return next_id_ - 1; }

  [[nodiscard]] std::uint64_t dispatch_count() const { return dispatches_; }
  [[nodiscard]] std::vector<std::string> take_audit();

 protected:
  /// Extension point for derived managers; called after a new record is stored.
  virtual void on_record_added(const errors::ErrorRecord& /*record*/) {}
  void audit(std::string line) { audit_.push_back(std::move(line)); }

 private:
  const errors::ErrorCatalog* catalog_;
  std::vector<errors::ErrorRecord> records_;
  errors::RecordId next_id_ = 1;
  std::int64_t tick_ = 0;
  std::uint64_t dispatches_ = 0;
  std::vector<std::string> audit_;
};

/// Adds a severity-filtered view and an audit channel. Modules written against
/// ErrorSink keep working unchanged.
class ExtendedErrorManager : public ErrorManager {
 public:
  using ErrorManager::ErrorManager;

  [[nodiscard]] std::vector<errors::ErrorRecord> published_at_least(errors::Severity min) const;
  [[nodiscard]] const std::vector<std::string>& audit_channel() const { return channel_; }

 protected:
  void on_record_added(const errors::ErrorRecord& record) override;

 private:
  std::vector<std::string> channel_;
};

}  // namespace plcsim::oo
