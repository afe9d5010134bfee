#pragma once

// Experiment files: one JSON document describing the problem, the schedule,
// the starting point and the run budget.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "exgrad/error.hpp"
#include "exgrad/solver.hpp"

namespace exgrad::harness {

enum class Method { extragradient, korpelevich };

struct ExperimentSpec {
  Method method = Method::extragradient;
  ProblemInstance<double> problem;
  /// Required for the extragradient method.
  std::optional<Schedule<double>> schedule;
  /// Step size of the baseline method (mirrors schedule->tau when both exist).
  double tau = 0.0;
  Point<double> x1;
  int max_iters = 1000;
  double stop_tol = 1e-12;
  /// Default trace destination from the file's "outputs" block; may be empty.
  std::string trace_path;
  std::string source;
};

/// Malformed document. `line`/`column` are 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Well-formed document describing an unusable experiment.
class ValidationError : public Error {
 public:
  using Error::Error;
};

enum class Validation { full, structural_only };

ExperimentSpec parse_experiment(std::string_view text, const std::string& source = "<memory>",
                                Validation mode = Validation::full);
ExperimentSpec load_experiment(const std::string& path, Validation mode = Validation::full);

/// Schedule conditions (i), (iii), (iv) and feasibility of x1.
void validate_experiment(const ExperimentSpec& spec);

SolveResult<double> execute(const ExperimentSpec& spec);

/// 0 converged, 2 max_iters, 3 inner_failure.
int exit_code(SolveStatus status);

struct RunOutcome {
  SolveResult<double> result;
  int exit_code = 0;
};

/// Runs the experiment, writes the trace CSV to `trace_path` and a JSON
/// summary next to it (`<trace_path>.summary.json`), and prints the summary.
RunOutcome run(const ExperimentSpec& spec, const std::string& trace_path, std::ostream& out);

/// EXGRAD_SEED, default 42.
std::uint64_t sampling_seed();

}  // namespace exgrad::harness
