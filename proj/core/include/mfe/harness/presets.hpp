#pragma once

#include <string>
#include <vector>

namespace mfe {

struct PresetInfo {
  std::string name;  ///< file stem
  std::string path;
  std::string kind;
  std::string description;
};

/// Directory holding the shipped presets: $MFE_PRESET_DIR if set, else the
/// source tree's presets/ directory recorded at build time.
std::string preset_dir();

/// All *.json presets, sorted by name.
std::vector<PresetInfo> list_presets();

/// Path of a preset given its name; throws Config when absent.
std::string preset_path(const std::string& name);

}  // namespace mfe
