#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "plcsim/runtime/module.hpp"

namespace plcsim::family {

enum class NodeKind { Feature, Variable, Action, OperatingModeAction, Visualization };
enum class Variability { Mandatory, Optional, AlternativeGroup, AlternativeChild };
enum class View { Hardware, Plc, Hmi };
enum class LinkDirection { PlcToHmi, HmiToPlc };
enum class Concern { OperatingModes, ErrorHandling, Diagnosis };

std::string_view to_string(NodeKind k);
std::string_view to_string(Variability v);
std::string_view to_string(View v);
std::string_view to_string(LinkDirection d);
std::string_view to_string(Concern c);

/// Malformed documents. Carries the line and column for JSON syntax errors.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by derive() for selections that do not resolve the model.
class SelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FamilyNode {
  /// Unique across all views, e.g. "plc.DO_Retract".
  std::string id;
  std::string name;
  NodeKind kind = NodeKind::Feature;
  Variability variability = Variability::Mandatory;
  /// Informational: the node was added to round out its view.
  bool extrapolated = false;
  /// OperatingModeAction only: ids of the Action nodes it drives.
  std::vector<std::string> refs;
  std::vector<FamilyNode> children;
};

struct CrossLink {
  std::string from;
  std::string to;
  LinkDirection direction = LinkDirection::PlcToHmi;
  Concern via = Concern::Diagnosis;

  bool operator==(const CrossLink&) const = default;
  bool operator<(const CrossLink& o) const;
};

struct FamilyModel {
  std::string name;
  /// Runtime module kind the PLC view describes, e.g. "Cylinder".
  std::string module_kind;
  std::map<View, FamilyNode> views;
  std::vector<CrossLink> links;

  [[nodiscard]] const FamilyNode* find(std::string_view id) const;
  [[nodiscard]] std::optional<View> view_of(std::string_view id) const;
};

FamilyModel load_model(std::string_view document);
FamilyModel load_model_file(const std::string& path);
nlohmann::ordered_json model_to_json(const FamilyModel& model);

/// Empty iff every invariant holds. Each entry starts with the rule name,
/// e.g. "group arity: plc.Kind has 1 child".
std::vector<std::string> validate(const FamilyModel& model);

/// Group name -> chosen child name, optional node name -> "on" / "off".
struct VariantSelection {
  std::map<std::string, std::string> choices;

  /// Parses "key=value" items. Throws SelectionError.
  static VariantSelection parse(const std::vector<std::string>& items);
};

struct VariantConfig {
  /// Every resolved node id, structural features included.
  std::set<std::string> included;
  /// Resolved non-Feature nodes per view.
  std::map<View, std::set<std::string>> concrete;
  /// Links whose endpoints both resolved.
  std::set<CrossLink> links;
  /// OperatingModeAction id -> resolved action refs.
  std::map<std::string, std::vector<std::string>> mode_actions;

  /// Names of the PLC view's Variable and Action nodes.
  [[nodiscard]] std::set<std::string> plc_signals(const FamilyModel& model) const;
  [[nodiscard]] std::set<std::string> plc_actions(const FamilyModel& model) const;
};

/// Throws SelectionError naming every uncovered group or unknown key.
VariantConfig derive(const FamilyModel& model, const VariantSelection& selection);
nlohmann::ordered_json config_to_json(const FamilyModel& model, const VariantConfig& config);

/// Every selection that covers all groups, optionals off.
std::vector<VariantSelection> enumerate_variants(const FamilyModel& model);

struct ConformanceReport {
  bool ok = true;
  /// "missing DO_Retract", "unexpected ACT_Retract", ...
  std::vector<std::string> mismatches;
};

ConformanceReport check_conformance(const FamilyModel& model, const VariantConfig& config,
                                    const ModuleManifest& manifest);

ModuleManifest manifest_from_json(const nlohmann::json& j);
nlohmann::ordered_json manifest_to_json(const ModuleManifest& m);

}  // namespace plcsim::family
