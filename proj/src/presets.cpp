#include "wqed/presets.hpp"

#include <algorithm>
#include <cstdlib>

namespace wqed {

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6"}; }

std::string preset_directory() {
  if (const char* env = std::getenv("WQED_PRESET_DIR"); env != nullptr && *env != '\0') return env;
  return WQED_PRESET_DIR;
}

Preset load_preset(const std::string& name, const std::string& directory) {
  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ConfigError("preset", "unknown preset '" + name + "' (expected fig1 ... fig6)");
  }
  const std::string dir = directory.empty() ? preset_directory() : directory;
  Preset p = parse_preset(read_text_file(dir + "/" + name + ".json"));
  if (p.name != name) throw ConfigError("preset", "file for '" + name + "' declares name '" + p.name + "'");
  return p;
}

}  // namespace wqed
