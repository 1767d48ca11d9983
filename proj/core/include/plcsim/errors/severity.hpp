#pragma once

#include <optional>
#include <string_view>

namespace plcsim::errors {

/// Error categories ordered by criticality: Message < Warning < Malfunction < Error.
enum class Severity { Message = 0, Warning = 1, Malfunction = 2, Error = 3 };

std::string_view to_string(Severity s);
std::optional<Severity> parse_severity(std::string_view text);

/// Malfunction and Error require a machine reaction; Message and Warning never do.
constexpr bool requires_reaction(Severity s) { return s >= Severity::Malfunction; }

}  // namespace plcsim::errors
