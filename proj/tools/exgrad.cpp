// exgrad command line front end.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "exgrad/harness/check.hpp"
#include "exgrad/harness/experiment.hpp"
#include "exgrad/harness/presets.hpp"
#include "exgrad/harness/rate.hpp"
#include "exgrad/harness/reproduce.hpp"

namespace {

namespace h = exgrad::harness;

constexpr int kUsageError = 1;
constexpr int kCheckFailed = 4;

exgrad::Point<double> parse_point(const std::string& csv) {
  std::vector<double> values;
  std::stringstream in(csv);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || cell.find_first_not_of(" \t", used) != std::string::npos)
      throw h::ParseError("--x1: bad number \"" + cell + "\"");
    values.push_back(v);
  }
  if (values.empty()) throw h::ParseError("--x1: empty vector");
  return exgrad::Point<double>(Eigen::Map<const exgrad::Vector<double>>(values.data(), static_cast<exgrad::Index>(values.size())));
}

void report_error(const h::ParseError& e) {
  std::cerr << "error: " << e.what();
  if (e.line() != 0 && std::string(e.what()).find("line") == std::string::npos)
    std::cerr << " (line " << e.line() << ", column " << e.column() << ')';
  std::cerr << '\n';
}

struct SolveArgs {
  std::string problem;
  std::optional<std::string> x1;
  std::optional<int> max_iters;
  std::optional<double> tol;
  std::string out;
};

int do_solve(const SolveArgs& args) {
  auto spec = h::load_experiment(args.problem, h::Validation::structural_only);
  if (args.x1) spec.x1 = parse_point(*args.x1);
  if (args.max_iters) spec.max_iters = *args.max_iters;
  if (args.tol) spec.stop_tol = *args.tol;
  h::validate_experiment(spec);
  std::string trace = args.out.empty() ? spec.trace_path : args.out;
  if (trace.empty()) trace = "trace.csv";
  return h::run(spec, trace, std::cout).exit_code;
}

int do_reproduce(const std::string& preset) {
  const auto rep = h::reproduce(preset);
  std::cout << rep.table;
  for (const auto& w : rep.result.warnings) std::cout << "warning: " << w << '\n';
  if (!rep.result.failure.empty()) std::cout << "failure: " << rep.result.failure << '\n';
  // Presets run a fixed number of iterations, so max_iters is the expected outcome.
  return rep.result.status == exgrad::SolveStatus::inner_failure ? h::exit_code(rep.result.status) : 0;
}

int do_check(const std::string& problem, int samples) {
  const auto spec = h::load_experiment(problem, h::Validation::structural_only);
  const auto report = h::check_hypotheses(spec, samples, h::sampling_seed());
  h::print_report(std::cout, report);
  return report.ok() ? 0 : kCheckFailed;
}

int do_rate(const std::string& trace) {
  const auto est = h::estimate_rate(trace);
  std::printf("geometric_ratio %.6g\nr_squared %.6g\nwindow %d..%d\n", est.geometric_ratio, est.r_squared,
              est.window_first, est.window_last);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extragradient solver for equilibrium, variational inequality and fixed-point problems"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "run an experiment file and write its trace");
  solve->add_option("--problem", solve_args.problem, "experiment JSON file")->required()->check(CLI::ExistingFile);
  solve->add_option("--x1", solve_args.x1, "starting point, comma separated");
  solve->add_option("--max-iters", solve_args.max_iters, "iteration budget")->check(CLI::PositiveNumber);
  solve->add_option("--tol", solve_args.tol, "stop when the step norm falls to this value")
      ->check(CLI::NonNegativeNumber);
  solve->add_option("--out", solve_args.out, "trace CSV path");

  std::string preset;
  auto* reproduce = app.add_subcommand("reproduce", "print the table for a shipped preset");
  reproduce->add_option("--preset", preset, "preset name")->required()->check(CLI::IsMember(h::preset_names()));

  std::string check_problem;
  int samples = 200;
  auto* check = app.add_subcommand("check", "sample every convergence hypothesis of an experiment");
  check->add_option("--problem", check_problem, "experiment JSON file")->required()->check(CLI::ExistingFile);
  check->add_option("--samples", samples, "samples per hypothesis")->check(CLI::PositiveNumber);

  std::string trace;
  auto* rate = app.add_subcommand("rate", "fit a geometric rate to a trace");
  rate->add_option("--trace", trace, "trace CSV written by solve")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*solve) return do_solve(solve_args);
    if (*reproduce) return do_reproduce(preset);
    if (*check) return do_check(check_problem, samples);
    if (*rate) return do_rate(trace);
  } catch (const h::ParseError& e) {
    report_error(e);
    return kUsageError;
  } catch (const exgrad::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}
