#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plcsim/errors/reaction.hpp"
#include "plcsim/errors/severity.hpp"

namespace plcsim::errors {

struct CatalogEntry {
  int number = 0;
  std::string message;
  Severity severity = Severity::Error;
  std::optional<ReactionCode> reaction_override;

  bool operator==(const CatalogEntry&) const = default;
};

/// Registered error numbers. Loaded from a JSON array of
/// {number, message, severity, reactionOverride?}.
class ErrorCatalog {
 public:
  ErrorCatalog() = default;
  explicit ErrorCatalog(std::vector<CatalogEntry> entries);

  /// Throws std::runtime_error on malformed documents or duplicate numbers.
  static ErrorCatalog from_json(std::string_view document);
  static ErrorCatalog from_file(const std::string& path);
  [[nodiscard]] std::string to_json() const;

  [[nodiscard]] const CatalogEntry* find(int number) const;
  [[nodiscard]] bool contains(int number) const { return find(number) != nullptr; }

  /// Severity used for a record; uncataloged numbers are treated as Error.
  [[nodiscard]] Severity severity_of(int number) const;
  /// Catalog override if present, otherwise the severity default.
  [[nodiscard]] ReactionCode reaction_for(int number) const;

  [[nodiscard]] std::vector<CatalogEntry> entries() const;

  bool operator==(const ErrorCatalog&) const = default;

 private:
  std::map<int, CatalogEntry> entries_;
};

/// The xPPU catalog: 1001 drag, 1002 motor jam, 1003 end-position timeout,
/// 2001 belt work piece missing, 2002 gripper product missing, 2003 emergency stop.
const ErrorCatalog& default_catalog();

}  // namespace plcsim::errors
