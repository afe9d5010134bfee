#pragma once

// Trace CSV: header `k,x,u,y,z,step_norm,phi_gap,resolvent_violation`.
// Vector columns are semicolon-joined, every number has 17 significant
// digits, and phi_gap is empty when no reference solution was given.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "exgrad/solver.hpp"

namespace exgrad::harness {

inline constexpr const char* kTraceHeader = "k,x,u,y,z,step_norm,phi_gap,resolvent_violation";

struct TraceRow {
  int k = 0;
  Vector<double> x, u, y, z;
  double step_norm = 0.0;
  std::optional<double> phi_gap;
  double resolvent_violation = 0.0;
};

std::string format_number(double v);

void write_trace_csv(std::ostream& out, const std::vector<IterationRecord<double>>& trace);
void write_trace_csv(const std::string& path, const std::vector<IterationRecord<double>>& trace);

std::vector<TraceRow> read_trace_csv(std::istream& in);
std::vector<TraceRow> read_trace_csv(const std::string& path);

}  // namespace exgrad::harness
