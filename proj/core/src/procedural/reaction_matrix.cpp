#include "plcsim/procedural/reaction_matrix.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace plcsim::procedural {

using errors::LocalAction;
using nlohmann::json;

const MatrixRow* ReactionMatrix::find(const std::string& path) const {
  auto it = entries_.find(path);
  return it == entries_.end() ? nullptr : &it->second;
}

LocalAction ReactionMatrix::resolve(const ModulePath& path, errors::ReactionCode code) const {
  const MatrixRow* row = find(path.str());
  if (!row || !row->effective_range.count(code.value())) return LocalAction::Ignore;
  auto it = row->rows.find(code.value());
  if (it != row->rows.end()) return it->second;
  return errors::standard_action_for(code);
}

std::vector<std::string> ReactionMatrix::check_against(const Module& root) const {
  std::vector<std::string> out;
  std::set<std::string> present;
  for (const Module* m : preorder(root)) {
    present.insert(m->path().str());
    if (!find(m->path().str())) out.push_back("reaction matrix: no line set for " + m->path().str() + ", it ignores every code");
  }
  for (const auto& [path, row] : entries_) {
    if (!present.count(path)) out.push_back("reaction matrix: entry for unknown module " + path + " ignored");
  }
  return out;
}

ReactionMatrix ReactionMatrix::from_json(std::string_view document, std::vector<std::string>* warnings) {
  auto warn = [&](std::string w) {
    if (warnings) warnings->push_back(std::move(w));
  };
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("reaction matrix: ") + e.what());
  }
  if (!doc.is_object()) throw std::runtime_error("reaction matrix: document must be an object");

  ReactionMatrix m;
  for (const auto& [path, entry] : doc.items()) {
    if (!entry.is_object()) {
      warn("reaction matrix: entry " + path + " is not an object, skipped");
      continue;
    }
    MatrixRow row;
    if (!entry.contains("effectiveRange")) warn("reaction matrix: " + path + " has no effectiveRange");
    for (const auto& [key, v] : entry.items()) {
      if (key == "effectiveRange") {
        for (const auto& c : v) {
          if (!c.is_number_integer() || c.get<int>() < 0 || c.get<int>() >= errors::ReactionCode::kWidth) {
            warn("reaction matrix: " + path + " effectiveRange value " + c.dump() + " ignored");
            continue;
          }
          row.effective_range.insert(c.get<int>());
        }
      } else if (key == "rows") {
        for (const auto& [code_text, action] : v.items()) {
          int code = -1;
          try {
            code = std::stoi(code_text);
          } catch (const std::exception&) {
          }
          const auto a = action.is_string() ? errors::parse_local_action(action.get<std::string>()) : std::nullopt;
          if (code < 0 || code >= errors::ReactionCode::kWidth || !a) {
            warn("reaction matrix: " + path + " row " + code_text + " ignored");
            continue;
          }
          row.rows[code] = *a;
        }
      } else {
        warn("reaction matrix: " + path + " unknown field " + key);
      }
    }
    for (const auto& [code, action] : row.rows) {
      if (!row.effective_range.count(code)) {
        warn("reaction matrix: " + path + " row " + std::to_string(code) + " lies outside effectiveRange");
      }
    }
    m.entries_[path] = std::move(row);
  }
  return m;
}

ReactionMatrix ReactionMatrix::from_file(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open reaction matrix " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str(), warnings);
}

std::string ReactionMatrix::to_json() const {
  json doc = json::object();
  for (const auto& [path, row] : entries_) {
    json rows = json::object();
    for (const auto& [code, action] : row.rows) rows[std::to_string(code)] = std::string(errors::to_string(action));
    doc[path] = json{{"effectiveRange", row.effective_range}, {"rows", rows}};
  }
  return doc.dump(2);
}

ReactionMatrix ReactionMatrix::derive_default(const Module& root) {
  ReactionMatrix m;
  for (const Module* mod : preorder(root)) {
    MatrixRow row;
    for (int c = 1; c <= 5; ++c) row.effective_range.insert(c);
    for (const auto& [code, action] : mod->application_reactions()) {
      row.effective_range.insert(code);
      row.rows[code] = action;
    }
    m.entries_[mod->path().str()] = std::move(row);
  }
  return m;
}

}  // namespace plcsim::procedural
