#include "madphys/harness/briefing.hpp"

#include "madphys/core/error.hpp"
#include "madphys_briefing_assets.hpp"

namespace madphys::harness {

std::string interpolate(std::string_view text, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t open = text.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, open - pos));
    const std::size_t close = text.find("}}", open + 2);
    if (close == std::string_view::npos) throw ConfigError("briefing template: unterminated placeholder");
    const std::string name(text.substr(open + 2, close - open - 2));
    auto it = values.find(name);
    if (it == values.end()) throw ConfigError("briefing template: no value for '" + name + "'");
    out += it->second;
    pos = close + 2;
  }
  return out;
}

std::string_view briefing_template(EnvironmentKind kind) {
  switch (kind) {
    case EnvironmentKind::Classical: return assets::classical;
    case EnvironmentKind::Fluid: return assets::fluid;
    case EnvironmentKind::Quantum: return assets::quantum;
  }
  return {};
}

std::string_view parameter_inference_template() { return assets::parameter_inference; }
std::string_view strategy_text() { return assets::strategy; }

}  // namespace madphys::harness
