#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "plcsim/errors/reaction.hpp"
#include "plcsim/runtime/module.hpp"

namespace plcsim::procedural {

/// One module's line set: the codes it reacts to and what it does with them.
/// Standard codes inside the range without an explicit row use the standard
/// action. Everything outside the range is an ineffective line.
struct MatrixRow {
  std::set<int> effective_range;
  std::map<int, errors::LocalAction> rows;

  bool operator==(const MatrixRow&) const = default;
};

/// Per-module reaction matrices, keyed by module path.
///
/// JSON: {"<module path>": {"effectiveRange": [1,2,...], "rows": {"32": "StopEndOfCycle"}}}
/// Checking is deliberately weak: unknown fields, bad rows, unknown modules and
/// modules without a line set only produce warnings.
class ReactionMatrix {
 public:
  void set(const std::string& path, MatrixRow row) { entries_[path] = std::move(row); }
  [[nodiscard]] const MatrixRow* find(const std::string& path) const;
  [[nodiscard]] const std::map<std::string, MatrixRow>& entries() const { return entries_; }

  [[nodiscard]] errors::LocalAction resolve(const ModulePath& path, errors::ReactionCode code) const;

  /// Warnings for entries naming absent modules and modules without an entry.
  [[nodiscard]] std::vector<std::string> check_against(const Module& root) const;

  /// Throws std::runtime_error only when the document is not JSON or not an object.
  static ReactionMatrix from_json(std::string_view document, std::vector<std::string>* warnings = nullptr);
  static ReactionMatrix from_file(const std::string& path, std::vector<std::string>* warnings = nullptr);
  [[nodiscard]] std::string to_json() const;

  /// Codes 1..5 for every module plus each module's application table.
  static ReactionMatrix derive_default(const Module& root);

  bool operator==(const ReactionMatrix&) const = default;

 private:
  std::map<std::string, MatrixRow> entries_;
};

}  // namespace plcsim::procedural
