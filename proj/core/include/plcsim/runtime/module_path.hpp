#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace plcsim {

/// Slash-separated location of a module inside the ISA-88 hierarchy,
/// e.g. "xPPU/Crane/Base". The first segment is always the Unit.
class ModulePath {
 public:
  ModulePath() = default;
  explicit ModulePath(std::vector<std::string> segments);

  /// Parses "A/B/C". Throws std::invalid_argument on empty text or empty segments.
  static ModulePath parse(std::string_view text);

  [[nodiscard]] const std::vector<std::string>& segments() const { return segments_; }
  [[nodiscard]] bool empty() const { return segments_.empty(); }
  [[nodiscard]] std::size_t depth() const { return segments_.size(); }
  [[nodiscard]] const std::string& leaf() const { return segments_.back(); }
  [[nodiscard]] std::string str() const;

  [[nodiscard]] ModulePath child(std::string name) const;
  [[nodiscard]] std::optional<ModulePath> parent() const;

  /// True when `this` equals `other` or is one of its ancestors.
  [[nodiscard]] bool contains(const ModulePath& other) const;

  auto operator<=>(const ModulePath&) const = default;
  bool operator==(const ModulePath&) const = default;

 private:
  std::vector<std::string> segments_;
};

inline std::ostream& operator<<(std::ostream& os, const ModulePath& p) { return os << p.str(); }

}  // namespace plcsim
