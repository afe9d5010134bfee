#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "exgrad/harness/experiment.hpp"

namespace exgrad::harness {

/// Names accepted by `reproduce --preset`.
std::vector<std::string> preset_names();

/// JSON text of a built-in preset (the files under presets/, compiled in).
std::string_view preset_source(std::string_view name);

ExperimentSpec preset_experiment(std::string_view name);

}  // namespace exgrad::harness
