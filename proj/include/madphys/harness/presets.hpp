#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "madphys/harness/config.hpp"

namespace madphys::harness {

/// Paper: full-size grids and horizons. Quick: reduced grids and horizons
/// so a whole sweep finishes in seconds.
enum class PresetScale { Quick, Paper };

const char* to_string(PresetScale scale) noexcept;
PresetScale parse_preset_scale(std::string_view name);

/// Configuration names per environment, in table column order.
std::vector<std::string> preset_names(EnvironmentKind kind);

/// Throws ConfigError for unknown names.
EpisodeConfig make_preset(EnvironmentKind kind, std::string_view name, PresetScale scale, std::uint64_t seed = 0);

}  // namespace madphys::harness
