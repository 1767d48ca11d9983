#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace plcsim::scenario {

enum class Projection { Full, Behavioral };

using ErrorKey = std::tuple<int, std::string, std::string>;

struct TraceDiff {
  std::optional<std::int64_t> tick;
  /// JSON pointer of the first divergent field, e.g. "/plant/axes/xPPU~1Crane~1Base".
  std::string field;
  std::string value_a;
  std::string value_b;
  /// Distinct (number, severity, origin) seen only in one trace.
  std::vector<ErrorKey> errors_only_a;
  std::vector<ErrorKey> errors_only_b;

  [[nodiscard]] bool empty() const { return !tick && errors_only_a.empty() && errors_only_b.empty(); }
  [[nodiscard]] std::string describe() const;
};

/// Compares two traces (header line first). Throws std::invalid_argument when
/// the headers name different scenarios.
TraceDiff compare_traces(const std::vector<std::string>& a, const std::vector<std::string>& b, Projection projection);

std::vector<std::string> read_trace(const std::string& path);

}  // namespace plcsim::scenario
