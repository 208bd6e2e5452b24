#pragma once

#include "wqed/config.hpp"

#include <string>
#include <vector>

namespace wqed {

// Names of the bundled figure presets (fig1 ... fig6).
std::vector<std::string> preset_names();

// Directory holding <name>.json presets: $WQED_PRESET_DIR when set,
// otherwise the source-tree presets/ directory.
std::string preset_directory();

Preset load_preset(const std::string& name, const std::string& directory = "");

}  // namespace wqed
