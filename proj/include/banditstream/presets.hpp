#pragma once

#include <string>
#include <vector>

namespace banditstream {

// Desk-scale experiment presets bundled with the tool.
std::vector<std::string> preset_names();
bool has_preset(const std::string& name);
std::string preset_toml(const std::string& name);

}  // namespace banditstream
