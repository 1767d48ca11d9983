#include "plcsim/family/family_model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>
#include <tuple>

namespace plcsim::family {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

template <typename E, std::size_t N>
std::optional<E> parse_enum(std::string_view text, const std::pair<E, std::string_view> (&table)[N]) {
  for (const auto& [e, name] : table) {
    if (name == text) return e;
  }
  return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view name_of(E e, const std::pair<E, std::string_view> (&table)[N]) {
  for (const auto& [v, name] : table) {
    if (v == e) return name;
  }
  return "?";
}

constexpr std::pair<NodeKind, std::string_view> kNodeKinds[] = {{NodeKind::Feature, "Feature"},
                                                                {NodeKind::Variable, "Variable"},
                                                                {NodeKind::Action, "Action"},
                                                                {NodeKind::OperatingModeAction, "OperatingModeAction"},
                                                                {NodeKind::Visualization, "Visualization"}};
constexpr std::pair<Variability, std::string_view> kVariabilities[] = {
    {Variability::Mandatory, "Mandatory"},
    {Variability::Optional, "Optional"},
    {Variability::AlternativeGroup, "AlternativeGroup"},
    {Variability::AlternativeChild, "AlternativeChild"}};
constexpr std::pair<View, std::string_view> kViews[] = {{View::Hardware, "hardware"}, {View::Plc, "plc"}, {View::Hmi, "hmi"}};
constexpr std::pair<LinkDirection, std::string_view> kDirections[] = {{LinkDirection::PlcToHmi, "PlcToHmi"},
                                                                      {LinkDirection::HmiToPlc, "HmiToPlc"}};
constexpr std::pair<Concern, std::string_view> kConcerns[] = {{Concern::OperatingModes, "OperatingModes"},
                                                              {Concern::ErrorHandling, "ErrorHandling"},
                                                              {Concern::Diagnosis, "Diagnosis"}};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

template <typename E, std::size_t N>
E require_enum(const json& j, const char* key, const std::pair<E, std::string_view> (&table)[N], const std::string& where) {
  const auto text = j.at(key).get<std::string>();
  auto e = parse_enum(text, table);
  if (!e) throw ModelError(where + ": unknown " + key + " '" + text + "'");
  return *e;
}

FamilyNode node_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ModelError(where + ": node must be an object");
  FamilyNode n;
  n.id = j.at("id").get<std::string>();
  const std::string at = where + " " + n.id;
  n.name = j.value("name", n.id.substr(n.id.rfind('.') + 1));
  n.kind = require_enum(j, "kind", kNodeKinds, at);
  n.variability = j.contains("variability") ? require_enum(j, "variability", kVariabilities, at) : Variability::Mandatory;
  n.extrapolated = j.value("extrapolated", false);
  n.refs = j.value("refs", std::vector<std::string>{});
  for (const auto& c : j.value("children", json::array())) n.children.push_back(node_from_json(c, where));
  return n;
}

ojson node_to_json(const FamilyNode& n) {
  ojson j;
  j["id"] = n.id;
  j["name"] = n.name;
  j["kind"] = std::string(to_string(n.kind));
  j["variability"] = std::string(to_string(n.variability));
  if (n.extrapolated) j["extrapolated"] = true;
  if (!n.refs.empty()) j["refs"] = n.refs;
  if (!n.children.empty()) {
    ojson cs = ojson::array();
    for (const auto& c : n.children) cs.push_back(node_to_json(c));
    j["children"] = cs;
  }
  return j;
}

void walk(const FamilyNode& n, const FamilyNode* parent, const std::function<void(const FamilyNode&, const FamilyNode*)>& f) {
  f(n, parent);
  for (const auto& c : n.children) walk(c, &n, f);
}

std::string line_col(std::string_view doc, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < doc.size(); ++i) {
    if (doc[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

std::string_view to_string(NodeKind k) { return name_of(k, kNodeKinds); }
std::string_view to_string(Variability v) { return name_of(v, kVariabilities); }
std::string_view to_string(View v) { return name_of(v, kViews); }
std::string_view to_string(LinkDirection d) { return name_of(d, kDirections); }
std::string_view to_string(Concern c) { return name_of(c, kConcerns); }

bool CrossLink::operator<(const CrossLink& o) const {
  return std::tie(from, to, direction, via) < std::tie(o.from, o.to, o.direction, o.via);
}

const FamilyNode* FamilyModel::find(std::string_view id) const {
  const FamilyNode* hit = nullptr;
  for (const auto& [v, root] : views) {
    walk(root, nullptr, [&](const FamilyNode& n, const FamilyNode*) {
      if (!hit && n.id == id) hit = &n;
    });
  }
  return hit;
}

std::optional<View> FamilyModel::view_of(std::string_view id) const {
  for (const auto& [v, root] : views) {
    bool found = false;
    walk(root, nullptr, [&](const FamilyNode& n, const FamilyNode*) { found = found || n.id == id; });
    if (found) return v;
  }
  return std::nullopt;
}

FamilyModel load_model(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ModelError("family model: syntax error at " + line_col(document, e.byte == 0 ? 0 : e.byte - 1) + ": " +
                     e.what());
  }
  try {
    if (!doc.is_object()) throw ModelError("family model must be an object");
    FamilyModel m;
    m.name = doc.value("name", "");
    m.module_kind = doc.value("moduleKind", "");
    const auto& views = doc.at("views");
    for (const auto& [key, root] : views.items()) {
      auto v = parse_enum(key, kViews);
      if (!v) throw ModelError("unknown view '" + key + "'");
      m.views[*v] = node_from_json(root, "view " + key);
    }
    for (const auto& l : doc.value("links", json::array())) {
      CrossLink link;
      link.from = l.at("from").get<std::string>();
      link.to = l.at("to").get<std::string>();
      const std::string where = "link " + link.from + " -> " + link.to;
      link.direction = require_enum(l, "direction", kDirections, where);
      link.via = require_enum(l, "via", kConcerns, where);
      m.links.push_back(link);
    }
    return m;
  } catch (const json::exception& e) {
    throw ModelError(std::string("family model: ") + e.what());
  }
}

FamilyModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open family model " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str());
}

ojson model_to_json(const FamilyModel& model) {
  ojson j;
  j["name"] = model.name;
  j["moduleKind"] = model.module_kind;
  ojson views = ojson::object();
  for (const auto& [v, root] : model.views) views[std::string(to_string(v))] = node_to_json(root);
  j["views"] = views;
  ojson links = ojson::array();
  for (const auto& l : model.links) {
    links.push_back({{"from", l.from},
                     {"to", l.to},
                     {"direction", std::string(to_string(l.direction))},
                     {"via", std::string(to_string(l.via))}});
  }
  j["links"] = links;
  return j;
}

std::vector<std::string> validate(const FamilyModel& model) {
  std::vector<std::string> out;
  for (const View v : {View::Hardware, View::Plc, View::Hmi}) {
    if (!model.views.count(v)) out.push_back("missing view: " + std::string(to_string(v)));
  }
  std::set<std::string> ids;
  for (const auto& [v, root] : model.views) {
    if (root.variability != Variability::Mandatory) {
      out.push_back("root variability: " + root.id + " must be Mandatory");
    }
    walk(root, nullptr, [&](const FamilyNode& n, const FamilyNode* parent) {
      if (!ids.insert(n.id).second) out.push_back("duplicate id: " + n.id);
      if (n.variability == Variability::AlternativeGroup) {
        if (n.children.size() < 2) {
          out.push_back("group arity: " + n.id + " has " + std::to_string(n.children.size()) + " child" +
                        (n.children.size() == 1 ? "" : "ren"));
        }
        for (const auto& c : n.children) {
          if (c.variability != Variability::AlternativeChild) {
            out.push_back("group child: " + c.id + " under " + n.id + " is not an AlternativeChild");
          }
        }
      }
      if (n.variability == Variability::AlternativeChild &&
          (parent == nullptr || parent->variability != Variability::AlternativeGroup)) {
        out.push_back("orphan alternative: " + n.id + " is not inside an AlternativeGroup");
      }
      if (!n.refs.empty() && n.kind != NodeKind::OperatingModeAction) {
        out.push_back("refs: " + n.id + " is not an OperatingModeAction");
      }
    });
  }
  for (const auto& [v, root] : model.views) {
    walk(root, nullptr, [&](const FamilyNode& n, const FamilyNode*) {
      for (const auto& r : n.refs) {
        const auto* target = model.find(r);
        if (!target) {
          out.push_back("dangling ref: " + n.id + " -> " + r);
        } else if (target->kind != NodeKind::Action) {
          out.push_back("ref kind: " + n.id + " -> " + r + " is not an Action");
        }
      }
    });
  }
  for (const auto& l : model.links) {
    const auto vf = model.view_of(l.from);
    const auto vt = model.view_of(l.to);
    if (!vf) out.push_back("dangling link: " + l.from + " -> " + l.to + " (missing " + l.from + ")");
    if (!vt) out.push_back("dangling link: " + l.from + " -> " + l.to + " (missing " + l.to + ")");
    if (!vf || !vt) continue;
    if (*vf == *vt) out.push_back("link within one view: " + l.from + " -> " + l.to);
    const bool plc_to_hmi = *vf == View::Plc && *vt == View::Hmi;
    const bool hmi_to_plc = *vf == View::Hmi && *vt == View::Plc;
    if ((l.direction == LinkDirection::PlcToHmi && !plc_to_hmi) ||
        (l.direction == LinkDirection::HmiToPlc && !hmi_to_plc)) {
      out.push_back("link direction: " + l.from + " -> " + l.to + " is not " + std::string(to_string(l.direction)));
    }
  }
  return out;
}

VariantSelection VariantSelection::parse(const std::vector<std::string>& items) {
  VariantSelection s;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw SelectionError("selection item '" + item + "' is not key=value");
    }
    s.choices[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return s;
}

VariantConfig derive(const FamilyModel& model, const VariantSelection& selection) {
  std::set<std::string> group_names;
  std::set<std::string> optional_names;
  for (const auto& [v, root] : model.views) {
    walk(root, nullptr, [&](const FamilyNode& n, const FamilyNode*) {
      if (n.variability == Variability::AlternativeGroup) group_names.insert(n.name);
      if (n.variability == Variability::Optional) optional_names.insert(n.name);
    });
  }
  std::vector<std::string> problems;
  for (const auto& [key, value] : selection.choices) {
    if (!group_names.count(key) && !optional_names.count(key)) problems.push_back("unknown selection key " + key);
    if (optional_names.count(key) && !group_names.count(key)) {
      const auto v = lower(value);
      if (v != "on" && v != "off" && v != "true" && v != "false") {
        problems.push_back("optional " + key + " expects on or off, got " + value);
      }
    }
  }

  VariantConfig c;
  std::vector<std::string> uncovered;
  std::function<void(const FamilyNode&, View)> include = [&](const FamilyNode& n, View view) {
    c.included.insert(n.id);
    if (n.kind != NodeKind::Feature) c.concrete[view].insert(n.id);
    if (n.variability == Variability::AlternativeGroup) {
      auto it = selection.choices.find(n.name);
      if (it == selection.choices.end()) {
        uncovered.push_back(n.name + " (" + n.id + ")");
        return;
      }
      const FamilyNode* chosen = nullptr;
      for (const auto& child : n.children) {
        if (lower(child.name) == lower(it->second)) chosen = &child;
      }
      if (!chosen) {
        problems.push_back("group " + n.name + " (" + n.id + ") has no alternative '" + it->second + "'");
        return;
      }
      include(*chosen, view);
      return;
    }
    for (const auto& child : n.children) {
      if (child.variability == Variability::Optional) {
        auto it = selection.choices.find(child.name);
        const bool on = it != selection.choices.end() && (lower(it->second) == "on" || lower(it->second) == "true");
        if (!on) continue;
      }
      include(child, view);
    }
  };
  for (const auto& [v, root] : model.views) include(root, v);

  if (!uncovered.empty()) {
    std::string msg = "selection does not cover group";
    msg += uncovered.size() > 1 ? "s " : " ";
    for (std::size_t i = 0; i < uncovered.size(); ++i) msg += (i ? ", " : "") + uncovered[i];
    problems.insert(problems.begin(), msg);
  }
  if (!problems.empty()) {
    std::string msg;
    for (std::size_t i = 0; i < problems.size(); ++i) msg += (i ? "; " : "") + problems[i];
    throw SelectionError(msg);
  }

  for (const auto& l : model.links) {
    if (c.included.count(l.from) && c.included.count(l.to)) c.links.insert(l);
  }
  for (const auto& [v, root] : model.views) {
    walk(root, nullptr, [&](const FamilyNode& n, const FamilyNode*) {
      if (n.kind != NodeKind::OperatingModeAction || !c.included.count(n.id)) return;
      auto& refs = c.mode_actions[n.id];
      for (const auto& r : n.refs) {
        if (c.included.count(r)) refs.push_back(r);
      }
    });
  }
  return c;
}

namespace {

std::set<std::string> plc_names(const FamilyModel& model, const VariantConfig& c, NodeKind kind) {
  std::set<std::string> out;
  auto it = c.concrete.find(View::Plc);
  if (it == c.concrete.end()) return out;
  for (const auto& id : it->second) {
    const auto* n = model.find(id);
    if (n && n->kind == kind) out.insert(n->name);
  }
  return out;
}

}  // namespace

std::set<std::string> VariantConfig::plc_signals(const FamilyModel& model) const {
  return plc_names(model, *this, NodeKind::Variable);
}

std::set<std::string> VariantConfig::plc_actions(const FamilyModel& model) const {
  return plc_names(model, *this, NodeKind::Action);
}

ojson config_to_json(const FamilyModel& model, const VariantConfig& config) {
  ojson j;
  j["model"] = model.name;
  ojson views = ojson::object();
  for (const auto& [v, ids] : config.concrete) {
    ojson arr = ojson::array();
    for (const auto& id : ids) arr.push_back(id);
    views[std::string(to_string(v))] = arr;
  }
  j["nodes"] = views;
  ojson links = ojson::array();
  for (const auto& l : config.links) {
    links.push_back({{"from", l.from},
                     {"to", l.to},
                     {"direction", std::string(to_string(l.direction))},
                     {"via", std::string(to_string(l.via))}});
  }
  j["links"] = links;
  ojson modes = ojson::object();
  for (const auto& [id, refs] : config.mode_actions) modes[id] = refs;
  j["modeActions"] = modes;
  j["signals"] = config.plc_signals(model);
  j["actions"] = config.plc_actions(model);
  return j;
}

std::vector<VariantSelection> enumerate_variants(const FamilyModel& model) {
  std::map<std::string, std::set<std::string>> groups;
  for (const auto& [v, root] : model.views) {
    walk(root, nullptr, [&](const FamilyNode& n, const FamilyNode*) {
      if (n.variability != Variability::AlternativeGroup) return;
      for (const auto& c : n.children) groups[n.name].insert(lower(c.name));
    });
  }
  std::vector<VariantSelection> out{VariantSelection{}};
  for (const auto& [name, options] : groups) {
    std::vector<VariantSelection> next;
    for (const auto& sel : out) {
      for (const auto& opt : options) {
        auto s = sel;
        s.choices[name] = opt;
        next.push_back(std::move(s));
      }
    }
    out = std::move(next);
  }
  std::vector<VariantSelection> valid;
  for (const auto& s : out) {
    try {
      derive(model, s);
      valid.push_back(s);
    } catch (const SelectionError&) {
    }
  }
  return valid;
}

ConformanceReport check_conformance(const FamilyModel& model, const VariantConfig& config,
                                    const ModuleManifest& manifest) {
  ConformanceReport r;
  auto compare = [&](const std::set<std::string>& want, const std::vector<std::string>& have_list) {
    const std::set<std::string> have(have_list.begin(), have_list.end());
    for (const auto& w : want) {
      if (!have.count(w)) r.mismatches.push_back("missing " + w);
    }
    for (const auto& h : have) {
      if (!want.count(h)) r.mismatches.push_back("unexpected " + h);
    }
  };
  compare(config.plc_signals(model), manifest.signals);
  compare(config.plc_actions(model), manifest.actions);
  r.ok = r.mismatches.empty();
  return r;
}

ModuleManifest manifest_from_json(const json& j) {
  try {
    ModuleManifest m;
    if (j.contains("path")) m.path = ModulePath::parse(j.at("path").get<std::string>());
    m.kind = j.value("kind", "");
    m.variant = j.value("variant", "");
    m.signals = j.value("signals", std::vector<std::string>{});
    m.actions = j.value("actions", std::vector<std::string>{});
    return m;
  } catch (const json::exception& e) {
    throw ModelError(std::string("manifest: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ModelError(std::string("manifest: ") + e.what());
  }
}

ojson manifest_to_json(const ModuleManifest& m) {
  ojson j;
  j["path"] = m.path.str();
  j["kind"] = m.kind;
  j["variant"] = m.variant;
  j["signals"] = m.signals;
  j["actions"] = m.actions;
  return j;
}

}  // namespace plcsim::family
