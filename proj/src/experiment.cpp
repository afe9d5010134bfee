#include "exgrad/harness/experiment.hpp"

#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "exgrad/harness/rate.hpp"
#include "exgrad/harness/trace_csv.hpp"

namespace exgrad::harness {

namespace {

using json = nlohmann::json;

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) schema_error(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(where, "missing field \"" + key + "\"");
  return *it;
}

// Numbers, rationals written as "p/q", or "inf" / "-inf".
double number(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_null()) schema_error(where, "expected a number");
  if (!v.is_string()) schema_error(where, "expected a number or a \"p/q\" string");
  const auto s = v.get<std::string>();
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  const auto slash = s.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const double value = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return value;
    }
    const std::string num = s.substr(0, slash);
    const std::string den = s.substr(slash + 1);
    const double n = std::stod(num, &used);
    if (used != num.size()) throw std::invalid_argument(s);
    const double d = std::stod(den, &used);
    if (used != den.size() || d == 0.0) throw std::invalid_argument(s);
    return n / d;
  } catch (const std::logic_error&) {
    schema_error(where, "cannot read \"" + s + "\" as a number");
  }
}

double number_field(const json& obj, const std::string& key, const std::string& where) {
  return number(require(obj, key, where), where + "/" + key);
}

Vector<double> vector_of(const json& v, const std::string& where) {
  if (!v.is_array()) schema_error(where, "expected an array");
  Vector<double> out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Index>(i)] = number(v[i], where + "/" + std::to_string(i));
  return out;
}

std::string type_of(const json& obj, const std::string& where) {
  const json& t = require(obj, "type", where);
  if (!t.is_string()) schema_error(where + "/type", "expected a string");
  return t.get<std::string>();
}

Space<double> parse_space(const json& j) {
  const std::string where = "/space";
  const json& kind = require(j, "kind", where);
  const auto dim_value = number_field(j, "dim", where);
  if (dim_value < 1 || dim_value != static_cast<double>(static_cast<long>(dim_value)))
    schema_error(where + "/dim", "expected a positive integer");
  const auto dim = static_cast<Index>(dim_value);
  if (kind == "euclidean") {
    if (j.contains("c") && number_field(j, "c", where) != 1.0) schema_error(where + "/c", "euclidean spaces have c = 1");
    return Space<double>::euclidean(dim);
  }
  if (kind == "lp") return Space<double>::lp(dim, number_field(j, "p", where), number_field(j, "c", where));
  schema_error(where + "/kind", "expected \"euclidean\" or \"lp\"");
}

FeasibleSet<double> parse_set(const json& j, Index dim) {
  const std::string where = "/set";
  const auto type = type_of(j, where);
  if (type == "box") {
    auto read_bounds = [&](const char* key, double missing) {
      const json& arr = require(j, key, where);
      if (!arr.is_array()) schema_error(where + "/" + key, "expected an array");
      Vector<double> out(static_cast<Index>(arr.size()));
      for (std::size_t i = 0; i < arr.size(); ++i)
        out[static_cast<Index>(i)] =
            arr[i].is_null() ? missing : number(arr[i], where + "/" + key + "/" + std::to_string(i));
      return out;
    };
    return FeasibleSet<double>::box(read_bounds("lower", -std::numeric_limits<double>::infinity()),
                                    read_bounds("upper", std::numeric_limits<double>::infinity()));
  }
  if (type == "halfspace")
    return FeasibleSet<double>::halfspace(DualPoint<double>(vector_of(require(j, "normal", where), where + "/normal")),
                                          number_field(j, "offset", where));
  if (type == "whole") return FeasibleSet<double>::whole(dim);
  schema_error(where + "/type", "unknown set type \"" + type + "\"");
}

Bifunction<double> parse_bifunction(const json* j, Index dim) {
  if (!j) return Bifunction<double>::zero(dim);
  const std::string where = "/bifunction";
  const auto type = type_of(*j, where);
  if (type == "zero") return Bifunction<double>::zero(dim);
  if (type == "quadratic1d") {
    if (dim != 1) schema_error(where, "quadratic1d requires a one-dimensional space");
    const double a = number_field(*j, "a", where);
    const double b = number_field(*j, "b", where);
    // Outside a > 0, b >= 0 the formula is kept but loses its closed-form tag.
    if (a > 0 && b >= 0) return Bifunction<double>::quadratic_1d(a, b);
    return Bifunction<double>::quadratic_1d_unchecked(a, b);
  }
  schema_error(where + "/type", "unknown bifunction type \"" + type + "\"");
}

MonotoneOperator<double> parse_operator(const json& j, const Space<double>& space) {
  const std::string where = "/operator";
  const auto type = type_of(j, where);
  std::optional<double> alpha;
  if (j.contains("alpha")) alpha = number_field(j, "alpha", where);
  if (type == "identity") return MonotoneOperator<double>::identity(space);
  if (type == "zero") return alpha ? MonotoneOperator<double>::zero(space, *alpha) : MonotoneOperator<double>::zero(space);
  if (type == "scalar_affine")
    return MonotoneOperator<double>::scalar_affine(space, number_field(j, "m", where), number_field(j, "q", where));
  if (type == "linear") {
    const json& rows = require(j, "matrix", where);
    if (!rows.is_array()) schema_error(where + "/matrix", "expected an array of rows");
    Eigen::MatrixXd m(static_cast<Index>(rows.size()), space.dim());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto row = vector_of(rows[r], where + "/matrix/" + std::to_string(r));
      if (row.size() != space.dim()) schema_error(where + "/matrix/" + std::to_string(r), "row length != dim");
      m.row(static_cast<Index>(r)) = row.transpose();
    }
    return MonotoneOperator<double>::linear(space, std::move(m), alpha);
  }
  schema_error(where + "/type", "unknown operator type \"" + type + "\"");
}

FixedPointMap<double> parse_map(const json* j, const Space<double>& space, const std::string& where) {
  if (!j) return FixedPointMap<double>::identity(space);
  const auto type = type_of(*j, where);
  if (type == "identity") return FixedPointMap<double>::identity(space);
  if (type == "scaling") return FixedPointMap<double>::scaling(space, number_field(*j, "t", where));
  schema_error(where + "/type", "unknown map type \"" + type + "\"");
}

Sequence<double> parse_sequence(const json& j, const std::string& where) {
  const auto type = type_of(j, where);
  if (type == "constant") return Sequence<double>::constant(number_field(j, "value", where));
  if (type == "affine_reciprocal")
    return Sequence<double>::affine_reciprocal(number_field(j, "base", where), number_field(j, "slope", where));
  schema_error(where + "/type", "unknown sequence type \"" + type + "\"");
}

Schedule<double> parse_schedule(const json& j) {
  const std::string where = "/schedule";
  auto r = parse_sequence(require(j, "r", where), where + "/r");
  const double a_floor = j.contains("a_floor") ? number_field(j, "a_floor", where) : r.infimum();
  return Schedule<double>{parse_sequence(require(j, "alpha", where), where + "/alpha"),
                          parse_sequence(require(j, "beta", where), where + "/beta"),
                          parse_sequence(require(j, "gamma", where), where + "/gamma"),
                          r,
                          number_field(j, "tau", where),
                          a_floor};
}

const json* optional_field(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

ExperimentSpec parse_experiment(std::string_view text, const std::string& source, Validation mode) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + e.what(), line, column);
  }
  if (!doc.is_object()) throw ParseError(source + ": top level must be an object");

  try {
    Method method = Method::extragradient;
    if (const json* m = optional_field(doc, "method")) {
      if (*m == "korpelevich") method = Method::korpelevich;
      else if (*m != "extragradient") schema_error("/method", "expected \"extragradient\" or \"korpelevich\"");
    }
    Space<double> space = parse_space(require(doc, "space", ""));
    FeasibleSet<double> set = parse_set(require(doc, "set", ""), space.dim());
    std::optional<Point<double>> reference;
    if (const json* r = optional_field(doc, "reference_solution"))
      reference = Point<double>(vector_of(*r, "/reference_solution"));

    ProblemInstance<double> problem{space,
                                    set,
                                    parse_bifunction(optional_field(doc, "bifunction"), space.dim()),
                                    parse_operator(require(doc, "operator", ""), space),
                                    parse_map(optional_field(doc, "mapT"), space, "/mapT"),
                                    parse_map(optional_field(doc, "mapS"), space, "/mapS"),
                                    std::move(reference)};
    problem.validate();

    std::optional<Schedule<double>> schedule;
    if (const json* s = optional_field(doc, "schedule")) schedule = parse_schedule(*s);
    double tau = 0.0;
    if (doc.contains("tau")) tau = number_field(doc, "tau", "");
    else if (schedule) tau = schedule->tau;
    if (method == Method::extragradient && !schedule) schema_error("", "missing field \"schedule\"");
    if (method == Method::korpelevich && !(tau > 0)) schema_error("/tau", "korpelevich requires tau > 0");

    Point<double> x1(vector_of(require(doc, "x1", ""), "/x1"));
    space.require_dim(x1.dim(), "x1");

    int max_iters = 1000;
    if (doc.contains("max_iters")) {
      const double m = number_field(doc, "max_iters", "");
      if (m < 1 || m != static_cast<double>(static_cast<int>(m))) schema_error("/max_iters", "expected a positive integer");
      max_iters = static_cast<int>(m);
    }
    const double stop_tol = doc.contains("stop_tol") ? number_field(doc, "stop_tol", "") : 1e-12;
    std::string trace_path;
    if (const json* out = optional_field(doc, "outputs"))
      if (const json* t = optional_field(*out, "trace")) trace_path = t->get<std::string>();

    ExperimentSpec spec{method, std::move(problem), std::move(schedule), tau, std::move(x1),
                        max_iters, stop_tol, std::move(trace_path), source};
    if (mode == Validation::full) validate_experiment(spec);
    return spec;
  } catch (const ParseError& e) {
    throw ParseError(source + ": " + e.what());
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(source + ": " + e.what());
  } catch (const json::exception& e) {
    throw ParseError(source + ": " + e.what());
  }
}

ExperimentSpec load_experiment(const std::string& path, Validation mode) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_experiment(text.str(), path, mode);
}

void validate_experiment(const ExperimentSpec& spec) {
  const auto& p = spec.problem;
  if (!contains(p.set, spec.x1, p.space.tolerance()))
    throw ValidationError(spec.source + ": infeasible start: x1 = " + format_vector(spec.x1.coords()) +
                          " is outside the feasible set");
  if (spec.method == Method::korpelevich) {
    if (!p.space.is_euclidean()) throw ValidationError(spec.source + ": korpelevich requires a euclidean space");
    return;
  }
  const auto diag = validate_schedule(*spec.schedule, p.op.alpha(), p.space.c());
  if (const auto* failed = diag.first_failure(); failed && !diag.acceptable())
    throw ValidationError(spec.source + ": schedule violates " + failed->name + " (" + failed->note + ")");
}

SolveResult<double> execute(const ExperimentSpec& spec) {
  const auto& p = spec.problem;
  if (spec.method == Method::korpelevich)
    return solve_korpelevich(p.space, p.op, p.set, spec.tau, spec.x1, spec.stop_tol, spec.max_iters);
  SolverOptions<double> opts;
  opts.stop_tol = spec.stop_tol;
  opts.max_iters = spec.max_iters;
  return solve(p, *spec.schedule, spec.x1, opts);
}

int exit_code(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return 0;
    case SolveStatus::max_iters: return 2;
    case SolveStatus::inner_failure: return 3;
  }
  return 3;
}

RunOutcome run(const ExperimentSpec& spec, const std::string& trace_path, std::ostream& out) {
  RunOutcome outcome{execute(spec), 0};
  const auto& result = outcome.result;
  outcome.exit_code = exit_code(result.status);
  write_trace_csv(trace_path, result.trace);

  json summary;
  summary["status"] = to_string(result.status);
  summary["iterations"] = result.trace.size();
  summary["final"] = std::vector<double>(result.final_point.coords().begin(), result.final_point.coords().end());
  summary["trace"] = trace_path;
  summary["warnings"] = result.warnings;
  if (!result.failure.empty()) summary["failure"] = result.failure;
  try {
    std::vector<TraceRow> rows = read_trace_csv(trace_path);
    const auto rate = estimate_rate(rows);
    summary["rate"] = {{"geometric_ratio", rate.geometric_ratio},
                       {"r_squared", rate.r_squared},
                       {"window", {rate.window_first, rate.window_last}}};
  } catch (const RateError& e) {
    summary["rate"] = nullptr;
    summary["rate_note"] = e.what();
  }
  std::ofstream(trace_path + ".summary.json") << summary.dump(2) << '\n';

  out << "status: " << summary["status"].get<std::string>() << '\n'
      << "iterations: " << result.trace.size() << '\n'
      << "final: " << format_vector(result.final_point.coords()) << '\n';
  if (summary["rate"].is_null())
    out << "rate: n/a (" << summary["rate_note"].get<std::string>() << ")\n";
  else
    out << "rate: " << summary["rate"]["geometric_ratio"].get<double>()
        << " (r^2 = " << summary["rate"]["r_squared"].get<double>() << ")\n";
  for (const auto& w : result.warnings) out << "warning: " << w << '\n';
  if (!result.failure.empty()) out << "failure: " << result.failure << '\n';
  out << "trace: " << trace_path << '\n';
  return outcome;
}

std::uint64_t sampling_seed() {
  if (const char* env = std::getenv("EXGRAD_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::logic_error&) {
      throw ParseError(std::string("EXGRAD_SEED is not an unsigned integer: ") + env);
    }
  }
  return 42;
}

}  // namespace exgrad::harness
