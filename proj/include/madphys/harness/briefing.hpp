#pragma once

#include <map>
#include <string>
#include <string_view>

#include "madphys/harness/actions.hpp"

namespace madphys::harness {

/// Replaces every `{{name}}` with values.at(name). Throws ConfigError on a
/// placeholder without a value or an unterminated placeholder.
std::string interpolate(std::string_view text, const std::map<std::string, std::string>& values);

/// Built-in templates compiled from assets/briefings.
std::string_view briefing_template(EnvironmentKind kind);
std::string_view parameter_inference_template();
std::string_view strategy_text();

}  // namespace madphys::harness
