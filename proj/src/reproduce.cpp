#include "exgrad/harness/reproduce.hpp"

#include <cstdio>
#include <sstream>

#include "exgrad/harness/presets.hpp"

namespace exgrad::harness {

namespace {

constexpr const char* kCoefficientNote =
    "note: for this schedule one iteration maps x to (79/144 + 25/(144k)) x, which follows by\n"
    "      substituting u = x/2, y = 3x/4, z = 3x/8, Tz = z and Sy = x/6 into the dual-space\n"
    "      combination. The closed form 79/144 - 16/(304k) quoted for this example (giving\n"
    "      x_2 = 1.7359 from x_1 = 3.5) is inconsistent with that schedule; the rows above come\n"
    "      from the iteration itself.\n";

std::string cell(const Point<double>& p) {
  std::string out;
  char buf[32];
  for (Index i = 0; i < p.dim(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", p[i]);
    if (i) out += ';';
    out += buf;
  }
  return out;
}

}  // namespace

Reproduction reproduce(std::string_view preset) {
  const ExperimentSpec spec = preset_experiment(preset);
  Reproduction rep{execute(spec), {}};

  std::ostringstream os;
  os << "preset " << preset << ": x1 = " << cell(spec.x1) << ", status " << to_string(rep.result.status) << "\n";
  char line[160];
  std::snprintf(line, sizeof line, "%5s  %-22s %-22s %-22s\n", "k", "x_k", "y_k", "z_k");
  os << line;
  for (int k : kTableRows) {
    if (k > static_cast<int>(rep.result.trace.size())) break;
    const auto& r = rep.result.trace[static_cast<std::size_t>(k - 1)];
    std::snprintf(line, sizeof line, "%5d  %-22s %-22s %-22s\n", r.k, cell(r.x).c_str(), cell(r.y).c_str(),
                  cell(r.z).c_str());
    os << line;
  }
  if (preset == "paper-35" || preset == "paper-neg4") os << kCoefficientNote;
  rep.table = os.str();
  return rep;
}

}  // namespace exgrad::harness
