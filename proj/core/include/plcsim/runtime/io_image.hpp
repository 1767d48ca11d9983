#pragma once

#include <map>
#include <string>
#include <string_view>

#include "plcsim/runtime/module_path.hpp"

namespace plcsim {

/// Process image shared between control logic and the plant. Signal names are
/// "<module path>.<signal>", e.g. "xPPU/Stack/Pusher.DO_Extend".
///
/// Inputs are written only while latching plant sensors, outputs only while
/// writing module outputs to the plant. std::map keeps iteration order stable.
struct IoImage {
  std::map<std::string, bool> digital_outputs;
  std::map<std::string, bool> digital_inputs;
  std::map<std::string, double> analog_outputs;
  std::map<std::string, double> analog_inputs;

  [[nodiscard]] bool di(const std::string& name) const {
    auto it = digital_inputs.find(name);
    return it != digital_inputs.end() && it->second;
  }
  [[nodiscard]] bool dout(const std::string& name) const {
    auto it = digital_outputs.find(name);
    return it != digital_outputs.end() && it->second;
  }
  [[nodiscard]] double ai(const std::string& name) const {
    auto it = analog_inputs.find(name);
    return it == analog_inputs.end() ? 0.0 : it->second;
  }
  [[nodiscard]] double ao(const std::string& name) const {
    auto it = analog_outputs.find(name);
    return it == analog_outputs.end() ? 0.0 : it->second;
  }

  bool operator==(const IoImage&) const = default;
};

inline std::string signal_name(const ModulePath& path, std::string_view signal) {
  std::string out = path.str();
  out += '.';
  out += signal;
  return out;
}

}  // namespace plcsim
