#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "exgrad/solver.hpp"

namespace exgrad::harness {

/// Iterations shown in reproduction tables.
inline constexpr int kTableRows[] = {1, 2, 3, 45, 46, 47, 98, 99, 100};

struct Reproduction {
  SolveResult<double> result;
  std::string table;
};

/// Runs a preset and formats k, x_k, y_k, z_k for the rows in kTableRows.
Reproduction reproduce(std::string_view preset);

}  // namespace exgrad::harness
