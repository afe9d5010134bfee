#pragma once

#include <string>
#include <vector>

#include "exgrad/error.hpp"
#include "exgrad/harness/trace_csv.hpp"

namespace exgrad::harness {

/// Geometric convergence rate fitted to the step residuals of a trace.
struct RateEstimate {
  double geometric_ratio = 0.0;
  double r_squared = 0.0;
  /// Inclusive iteration range of the fit.
  int window_first = 0;
  int window_last = 0;
};

class RateError : public Error {
 public:
  using Error::Error;
};

/// Least-squares slope of log(step_norm) against k over the tail half of the
/// rows with positive residual (at least 10); ratio = exp(slope).
RateEstimate estimate_rate(const std::vector<TraceRow>& rows);
RateEstimate estimate_rate(const std::string& trace_path);

}  // namespace exgrad::harness
