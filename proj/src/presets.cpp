#include "exgrad/harness/presets.hpp"

#include "preset_data.hpp"

namespace exgrad::harness {

namespace {

// Preset name -> file under presets/.
constexpr std::pair<std::string_view, std::string_view> kAliases[] = {
    {"paper-35", "paper-example"},
    {"paper-neg4", "paper-neg4"},
    {"corollary-demo", "corollary-demo"},
    {"korpelevich-demo", "korpelevich-demo"},
};

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, file] : kAliases) out.emplace_back(name);
  return out;
}

std::string_view preset_source(std::string_view name) {
  std::string_view file = name;
  for (const auto& [alias, target] : kAliases)
    if (alias == name) file = target;
  for (const auto& [stem, text] : detail::kPresetFiles)
    if (stem == file) return text;
  throw InvalidArgument("unknown preset \"" + std::string(name) + "\"");
}

ExperimentSpec preset_experiment(std::string_view name) {
  return parse_experiment(preset_source(name), "preset:" + std::string(name));
}

}  // namespace exgrad::harness
