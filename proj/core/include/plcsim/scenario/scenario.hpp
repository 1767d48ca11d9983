#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "plcsim/plant/config.hpp"
#include "plcsim/runtime/command.hpp"
#include "plcsim/runtime/snapshot.hpp"

namespace plcsim::scenario {

/// Raised for malformed or inconsistent scenario files (exit code 2).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScheduleEntry {
  /// Enqueued before the scan that produces snapshot tick + 1.
  std::int64_t tick = 0;
  CommandBody command;
};

enum class When { At, Always, Eventually, Final };

/// A check on snapshots. `predicate` is a one-key object, see docs/scenario-schema.md.
struct Assertion {
  std::string label;
  When when = When::Final;
  std::optional<std::int64_t> tick;
  std::optional<std::int64_t> from;
  std::optional<std::int64_t> until;
  nlohmann::json predicate;
};

struct Scenario {
  std::string name;
  std::string description;
  plant::PlantConfig plant_config;
  std::int64_t run_ticks = 0;
  std::vector<ScheduleEntry> schedule;
  std::vector<Assertion> assertions;
};

/// Throws ValidationError.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);
nlohmann::ordered_json scenario_to_json(const Scenario& s);

/// Scenario files (*.json) in `dir`, sorted by name.
std::vector<std::string> list_scenarios(const std::string& dir);

/// Throws ValidationError for unknown predicate kinds or malformed arguments.
void validate_predicate(const nlohmann::json& predicate);
bool evaluate_predicate(const nlohmann::json& predicate, const Snapshot& s, const plant::PlantConfig& config);

}  // namespace plcsim::scenario
