#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "exgrad/harness/experiment.hpp"
#include "exgrad/report.hpp"

namespace exgrad::harness {

/// Consolidated report over every hypothesis of the convergence theorem:
/// bifunction axioms, relative nonexpansiveness of T and S, the alpha
/// estimate, norm domination and the schedule conditions.
struct HypothesisReport {
  std::vector<CheckItem> items;

  bool ok() const { return all_passed(items); }
  const CheckItem* find(std::string_view prefix) const;
};

HypothesisReport check_hypotheses(const ExperimentSpec& spec, int samples, std::uint64_t seed);

void print_report(std::ostream& out, const HypothesisReport& report);

}  // namespace exgrad::harness
