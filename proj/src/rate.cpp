#include "exgrad/harness/rate.hpp"

#include <algorithm>
#include <cmath>

namespace exgrad::harness {

RateEstimate estimate_rate(const std::vector<TraceRow>& rows) {
  std::vector<std::pair<double, double>> points;  // (k, log residual)
  for (const auto& row : rows) {
    if (row.step_norm < 0 || std::isnan(row.step_norm)) throw RateError("negative or NaN residual in trace");
    if (row.step_norm > 0 && std::isfinite(row.step_norm)) points.emplace_back(row.k, std::log(row.step_norm));
  }
  constexpr std::size_t min_points = 10;
  if (points.size() < min_points) throw RateError("too few positive residuals");

  const std::size_t window = std::max(min_points, points.size() / 2);
  const auto first = points.end() - static_cast<std::ptrdiff_t>(window);
  double mk = 0, ml = 0;
  for (auto it = first; it != points.end(); ++it) {
    mk += it->first;
    ml += it->second;
  }
  mk /= static_cast<double>(window);
  ml /= static_cast<double>(window);
  double skk = 0, skl = 0, sll = 0;
  for (auto it = first; it != points.end(); ++it) {
    const double dk = it->first - mk, dl = it->second - ml;
    skk += dk * dk;
    skl += dk * dl;
    sll += dl * dl;
  }
  if (skk == 0) throw RateError("degenerate iteration window");
  const double slope = skl / skk;
  RateEstimate est;
  est.geometric_ratio = std::exp(slope);
  est.r_squared = sll == 0 ? 1.0 : (skl * skl) / (skk * sll);
  est.window_first = static_cast<int>(first->first);
  est.window_last = static_cast<int>(points.back().first);
  return est;
}

RateEstimate estimate_rate(const std::string& trace_path) { return estimate_rate(read_trace_csv(trace_path)); }

}  // namespace exgrad::harness
