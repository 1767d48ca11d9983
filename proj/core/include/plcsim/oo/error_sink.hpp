#pragma once

#include <optional>
#include <string_view>

#include "plcsim/errors/error_event.hpp"
#include "plcsim/errors/severity.hpp"
#include "plcsim/runtime/build_error.hpp"
#include "plcsim/runtime/module_path.hpp"

namespace plcsim::oo {

/// The one operation handed to every module at initialization. The signature
/// carries all five fields, so a report cannot leave any of them out.
class ErrorSink {
 public:
  virtual ~ErrorSink() = default;
  virtual errors::RecordId add_error(errors::Severity severity, const ModulePath& origin, std::string_view cause,
                                     int number, std::string_view message) = 0;
};

/// Discards everything. Used to show that process logic does not depend on
/// error handling.
class NullErrorSink final : public ErrorSink {
 public:
  errors::RecordId add_error(errors::Severity, const ModulePath&, std::string_view, int,
                             std::string_view) override {
    return 0;
  }
};

/// Set-once property holding the module's error sink.
class SinkSlot {
 public:
  /// Throws BuildError when the slot is already set.
  void set(ErrorSink& sink) {
    if (sink_) throw BuildError("error sink already injected");
    sink_ = &sink;
  }
  [[nodiscard]] bool is_set() const { return sink_ != nullptr; }
  /// Throws BuildError when the slot was never set.
  [[nodiscard]] ErrorSink& get() const {
    if (!sink_) throw BuildError("error sink not injected");
    return *sink_;
  }
  /// Address of the implementation behind the slot, for identity checks.
  [[nodiscard]] const ErrorSink* identity() const { return sink_; }

 private:
  ErrorSink* sink_ = nullptr;
};

struct NeighborStatus {
  bool has_error = false;
  std::optional<errors::Severity> severity_max;

  bool operator==(const NeighborStatus&) const = default;
};

/// Read-only view on the error state of other modules. The answer for a path
/// aggregates the unacknowledged records of that module and its descendants.
class NeighborStatusQuery {
 public:
  virtual ~NeighborStatusQuery() = default;
  [[nodiscard]] virtual NeighborStatus status_of(const ModulePath& path) const = 0;
};

}  // namespace plcsim::oo
