#include "mfe/harness/presets.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mfe/errors.hpp"

#ifndef MFE_PRESET_DIR
#define MFE_PRESET_DIR "presets"
#endif

namespace mfe {

namespace fs = std::filesystem;

std::string preset_dir() {
  if (const char* env = std::getenv("MFE_PRESET_DIR"); env && *env) return env;
  return MFE_PRESET_DIR;
}

std::vector<PresetInfo> list_presets() {
  std::vector<PresetInfo> out;
  const fs::path dir = preset_dir();
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    PresetInfo p{entry.path().stem().string(), entry.path().string(), "", ""};
    std::ifstream in(entry.path());
    const auto doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_object()) {
      p.kind = doc.value("kind", "");
      p.description = doc.value("description", "");
    }
    out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [](const PresetInfo& a, const PresetInfo& b) { return a.name < b.name; });
  return out;
}

std::string preset_path(const std::string& name) {
  for (const auto& p : list_presets())
    if (p.name == name) return p.path;
  fail(ErrorCode::Config, "no preset named '" + name + "' in " + preset_dir());
}

}  // namespace mfe
