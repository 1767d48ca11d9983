#include "plcsim/runtime/module_path.hpp"

#include <stdexcept>

namespace plcsim {

namespace {

void check_segment(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("module path segment must not be empty");
  if (s.find('/') != std::string::npos || s.find('.') != std::string::npos) {
    throw std::invalid_argument("module path segment '" + s + "' contains a reserved character");
  }
}

}  // namespace

ModulePath::ModulePath(std::vector<std::string> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw std::invalid_argument("module path must not be empty");
  for (const auto& s : segments_) check_segment(s);
}

ModulePath ModulePath::parse(std::string_view text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find('/', start);
    parts.emplace_back(text.substr(start, pos == std::string_view::npos ? text.size() - start : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return ModulePath(std::move(parts));
}

std::string ModulePath::str() const {
  std::string out;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (i) out += '/';
    out += segments_[i];
  }
  return out;
}

ModulePath ModulePath::child(std::string name) const {
  check_segment(name);
  auto segs = segments_;
  segs.push_back(std::move(name));
  return ModulePath(std::move(segs));
}

std::optional<ModulePath> ModulePath::parent() const {
  if (segments_.size() <= 1) return std::nullopt;
  return ModulePath(std::vector<std::string>(segments_.begin(), segments_.end() - 1));
}

bool ModulePath::contains(const ModulePath& other) const {
  if (segments_.size() > other.segments_.size()) return false;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (segments_[i] != other.segments_[i]) return false;
  }
  return true;
}

}  // namespace plcsim
