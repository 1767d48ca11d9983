#pragma once

#include <stdexcept>
#include <string>

namespace plcsim {

/// Raised while assembling a runtime: invalid hierarchy, bad configuration,
/// missing or doubled error-sink injection.
class BuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace plcsim
