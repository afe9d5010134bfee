#pragma once

// The extragradient iteration with generalized projections:
//
//   u_k      = K_{r_k} x_k
//   y_k      = Pi_C J^{-1}(J x_k - tau A x_k)
//   z_k      = Pi_C J^{-1}(J u_k - tau A u_k)
//   x_{k+1}  = Pi_C J^{-1}(alpha_k J x_k + beta_k J T z_k + gamma_k J S y_k)
//
// together with schedule validation, the f = 0 / T = I variant and the
// classical two-step extragradient method used as a Hilbert-space baseline.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "exgrad/equilibrium.hpp"
#include "exgrad/operators.hpp"
#include "exgrad/report.hpp"
#include "exgrad/sets.hpp"
#include "exgrad/space.hpp"

namespace exgrad {

/// k -> base + slope / k for k >= 1 (slope = 0 gives a constant).
template <typename Scalar>
struct Sequence {
  Scalar base = Scalar(0);
  Scalar slope = Scalar(0);

  static Sequence constant(Scalar v) { return {v, Scalar(0)}; }
  static Sequence affine_reciprocal(Scalar base, Scalar slope) { return {base, slope}; }

  Scalar operator()(int k) const { return base + slope / Scalar(k); }
  Scalar limit() const { return base; }
  /// inf over k >= 1; the sequence is monotone so it is attained at k = 1 or in the limit.
  Scalar infimum() const { return std::min(base + slope, base); }
  Scalar supremum() const { return std::max(base + slope, base); }
  bool is_constant() const { return slope == Scalar(0); }
};

template <typename Scalar>
struct Schedule {
  Sequence<Scalar> alpha;
  Sequence<Scalar> beta;
  Sequence<Scalar> gamma;
  Sequence<Scalar> r;
  Scalar tau;
  /// Lower bound a > 0 required of every r_k.
  Scalar a_floor;
};

/// Outcome of the four convergence conditions, in order (i)..(iv).
struct ScheduleDiagnostics {
  std::array<CheckItem, 4> conditions;

  /// (i), (iii) and (iv) are required; (ii) only warns.
  bool acceptable() const {
    return conditions[0].passed() && conditions[2].passed() && conditions[3].passed();
  }
  const CheckItem* first_failure() const {
    for (const auto& c : conditions)
      if (!c.passed()) return &c;
    return nullptr;
  }
};

inline constexpr const char* kConditionWeights = "(i) alpha_k + beta_k + gamma_k = 1, each in [0,1]";
inline constexpr const char* kConditionLiminf = "(ii) liminf alpha_k*beta_k > 0 & liminf alpha_k*gamma_k > 0";
inline constexpr const char* kConditionResolvent = "(iii) r_k >= a > 0";
inline constexpr const char* kConditionStep = "(iv) 0 < tau < c^2*alpha/2";

/// Decides the schedule conditions symbolically for the parametric family;
/// (i) is also evaluated numerically for k = 1..horizon.
template <typename Scalar>
ScheduleDiagnostics validate_schedule(const Schedule<Scalar>& s, Scalar alpha, Scalar c, int horizon = 1000) {
  if (!(alpha > Scalar(0))) throw InvalidArgument("alpha must be positive");
  if (!(c > Scalar(0) && c <= Scalar(1))) throw InvalidArgument("c must lie in (0, 1]");
  ScheduleDiagnostics d{{CheckItem{kConditionWeights}, CheckItem{kConditionLiminf}, CheckItem{kConditionResolvent},
                         CheckItem{kConditionStep}}};
  constexpr Scalar eps = Scalar(1e-12);

  auto& weights = d.conditions[0];
  const Scalar base_gap = std::abs(s.alpha.base + s.beta.base + s.gamma.base - Scalar(1));
  const Scalar slope_gap = std::abs(s.alpha.slope + s.beta.slope + s.gamma.slope);
  Scalar worst = std::max(base_gap, slope_gap);
  for (int k = 1; k <= horizon; ++k)
    worst = std::max(worst, std::abs(s.alpha(k) + s.beta(k) + s.gamma(k) - Scalar(1)));
  for (const auto* seq : {&s.alpha, &s.beta, &s.gamma})
    worst = std::max({worst, -seq->infimum(), seq->supremum() - Scalar(1)});
  weights.worst = static_cast<double>(std::max(worst, Scalar(0)));
  if (worst > eps) {
    weights.status = CheckStatus::fail;
    weights.witness = "weights leave the simplex by " + std::to_string(weights.worst);
  }

  auto& liminf = d.conditions[1];
  const Scalar ab = s.alpha.limit() * s.beta.limit();
  const Scalar ag = s.alpha.limit() * s.gamma.limit();
  liminf.note = "liminf alpha*beta = " + format_scalar(ab) +
                ", liminf alpha*gamma = " + format_scalar(ag);
  if (!(ab > Scalar(0)) || !(ag > Scalar(0))) {
    liminf.status = CheckStatus::warn;
    liminf.worst = static_cast<double>(std::max(-std::min(ab, ag), Scalar(0)));
    liminf.witness = ab > Scalar(0) ? "alpha_k*gamma_k -> 0" : "alpha_k*beta_k -> 0";
  }

  auto& resolvent = d.conditions[2];
  const Scalar r_inf = s.r.infimum();
  resolvent.note = "inf r_k = " + format_scalar(r_inf) +
                   ", a = " + format_scalar(s.a_floor);
  if (!(s.a_floor > Scalar(0)) || r_inf < s.a_floor) {
    resolvent.status = CheckStatus::fail;
    resolvent.worst = static_cast<double>(std::max(s.a_floor - r_inf, -s.a_floor));
  }

  auto& step = d.conditions[3];
  const Scalar cap = c * c * alpha / Scalar(2);
  step.note = "tau = " + format_scalar(s.tau) +
              ", c^2*alpha/2 = " + format_scalar(cap);
  if (!(s.tau > Scalar(0)) || !(s.tau < cap)) {
    step.status = CheckStatus::fail;
    step.worst = static_cast<double>(s.tau > Scalar(0) ? s.tau - cap : -s.tau);
  }
  return d;
}

template <typename Scalar>
struct ProblemInstance {
  Space<Scalar> space;
  FeasibleSet<Scalar> set;
  Bifunction<Scalar> f;
  MonotoneOperator<Scalar> op;
  FixedPointMap<Scalar> map_t;
  FixedPointMap<Scalar> map_s;
  /// A known member of the common solution set, used for diagnostics only.
  std::optional<Point<Scalar>> reference_solution;

  void validate() const {
    space.require_dim(set.dim(), "feasible set");
    space.require_dim(f.dim(), "bifunction");
    space.require_dim(op.dim(), "operator");
    space.require_dim(map_t.dim(), "map T");
    space.require_dim(map_s.dim(), "map S");
    if (reference_solution) space.require_dim(reference_solution->dim(), "reference solution");
  }
};

template <typename Scalar>
struct IterationRecord {
  int k = 1;
  Point<Scalar> x;
  Point<Scalar> u;
  Point<Scalar> y;
  Point<Scalar> z;
  /// ||x_{k+1} - x_k||
  Scalar step_norm = Scalar(0);
  /// phi(reference, x_k), phi(reference, y_k), phi(reference, z_k).
  std::optional<Scalar> phi_gap;
  std::optional<Scalar> phi_gap_y;
  std::optional<Scalar> phi_gap_z;
  Scalar resolvent_violation = Scalar(0);
  /// Inner residuals of the projections producing y, z and x_{k+1}.
  std::array<Scalar, 3> projection_residuals{};
};

enum class SolveStatus { converged, max_iters, inner_failure };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iters: return "max_iters";
    case SolveStatus::inner_failure: return "inner_failure";
  }
  return "?";
}

template <typename Scalar>
struct SolveResult {
  SolveStatus status = SolveStatus::max_iters;
  Point<Scalar> final_point;
  /// One record per completed iteration. After an inner failure it holds the
  /// iterations that finished before the failing one.
  std::vector<IterationRecord<Scalar>> trace;
  std::vector<std::string> warnings;
  std::string failure;
};

template <typename Scalar>
struct SolverOptions {
  /// Stop once ||x_{k+1} - x_k|| <= stop_tol.
  Scalar stop_tol = Scalar(1e-12);
  int max_iters = 1000;
  /// Optional second stopping rule on phi(reference, x_k).
  std::optional<Scalar> phi_tol;
  ResolventOptions<Scalar> resolvent;
  ProjectionOptions<Scalar> projection;
  int norm_domination_samples = 64;
};

template <typename Scalar>
struct StepResult {
  Point<Scalar> x_next;
  IterationRecord<Scalar> record;
};

/// One iteration from x_k. The convex combination is formed on J-images in
/// the dual space and mapped back, in every geometry.
template <typename Scalar>
StepResult<Scalar> step(const ProblemInstance<Scalar>& p, const Schedule<Scalar>& s, int k, const Point<Scalar>& x,
                        const SolverOptions<Scalar>& opts = {}) {
  const auto& space = p.space;
  auto project = [&](const DualPoint<Scalar>& target, Scalar& residual) {
    auto res = generalized_projection_detailed(space, p.set, duality_map_inverse(space, target), opts.projection);
    residual = res.residual;
    return res.point;
  };

  IterationRecord<Scalar> rec;
  rec.k = k;
  rec.x = x;

  const ResolventQuery<Scalar> query{space, p.f, p.op, p.set, s.r(k), x};
  auto outcome = resolve(query, opts.resolvent);
  rec.u = outcome.u;
  rec.resolvent_violation = outcome.violation;

  const DualPoint<Scalar> jx = duality_map(space, x);
  const DualPoint<Scalar> ju = duality_map(space, rec.u);
  rec.y = project(jx - s.tau * p.op(x), rec.projection_residuals[0]);
  rec.z = project(ju - s.tau * p.op(rec.u), rec.projection_residuals[1]);

  const Point<Scalar> tz = apply_map(space, p.map_t, p.set, rec.z);
  const Point<Scalar> sy = apply_map(space, p.map_s, p.set, rec.y);
  const DualPoint<Scalar> combo = s.alpha(k) * jx + s.beta(k) * duality_map(space, tz) + s.gamma(k) * duality_map(space, sy);
  Point<Scalar> x_next = project(combo, rec.projection_residuals[2]);

  rec.step_norm = norm(space, x_next - x);
  if (p.reference_solution) {
    rec.phi_gap = lyapunov(space, *p.reference_solution, x);
    rec.phi_gap_y = lyapunov(space, *p.reference_solution, rec.y);
    rec.phi_gap_z = lyapunov(space, *p.reference_solution, rec.z);
  }
  return {std::move(x_next), std::move(rec)};
}

/// Runs the iteration from x1. Rejects schedules failing (i), (iii) or (iv)
/// with ScheduleError and infeasible starts with InvalidArgument; inner
/// failures end the run with status inner_failure.
template <typename Scalar>
SolveResult<Scalar> solve(const ProblemInstance<Scalar>& p, const Schedule<Scalar>& s, const Point<Scalar>& x1,
                          const SolverOptions<Scalar>& opts = {}) {
  p.validate();
  p.space.require_dim(x1.dim(), "starting point");
  if (!contains(p.set, x1, p.space.tolerance())) throw InvalidArgument("starting point is outside the feasible set");

  SolveResult<Scalar> result;
  const auto diagnostics = validate_schedule(s, p.op.alpha(), p.space.c());
  if (!diagnostics.acceptable()) {
    const auto* failed = diagnostics.first_failure();
    throw ScheduleError("schedule violates " + failed->name + " (" + failed->note + ")");
  }
  if (diagnostics.conditions[1].status == CheckStatus::warn)
    result.warnings.push_back("schedule: " + diagnostics.conditions[1].name + " fails; convergence not guaranteed");
  if (p.reference_solution) {
    const auto dom = check_norm_domination(p.space, p.op, *p.reference_solution, p.set, opts.norm_domination_samples);
    if (!dom.passed()) result.warnings.push_back("hypothesis " + dom.name + " violated at " + dom.witness);
  }

  Point<Scalar> x = x1;
  result.final_point = x1;
  for (int k = 1; k <= opts.max_iters; ++k) {
    StepResult<Scalar> st;
    try {
      st = step(p, s, k, x, opts);
    } catch (const Error& e) {
      result.status = SolveStatus::inner_failure;
      result.failure = "iteration " + std::to_string(k) + ": " + e.what();
      result.final_point = x;
      return result;
    }
    const bool small_step = st.record.step_norm <= opts.stop_tol;
    const bool small_gap = opts.phi_tol && st.record.phi_gap && *st.record.phi_gap <= *opts.phi_tol;
    result.trace.push_back(std::move(st.record));
    x = std::move(st.x_next);
    result.final_point = x;
    if (small_step || small_gap) {
      result.status = SolveStatus::converged;
      return result;
    }
  }
  result.status = SolveStatus::max_iters;
  return result;
}

/// The f = 0, T = I specialisation: a common point of VI(C, A) and F(S).
template <typename Scalar>
SolveResult<Scalar> solve_corollary(const Space<Scalar>& space, const FeasibleSet<Scalar>& set,
                                    const MonotoneOperator<Scalar>& op, const FixedPointMap<Scalar>& map_s,
                                    std::optional<Point<Scalar>> reference, const Schedule<Scalar>& s,
                                    const Point<Scalar>& x1, const SolverOptions<Scalar>& opts = {}) {
  const ProblemInstance<Scalar> p{space, set, Bifunction<Scalar>::zero(space.dim()), op,
                                  FixedPointMap<Scalar>::identity(space), map_s, std::move(reference)};
  return solve(p, s, x1, opts);
}

/// Classical extragradient method in a Euclidean space:
///   y_k = P_C(x_k - tau A x_k),  x_{k+1} = P_C(x_k - tau A y_k).
/// Records store x_k in `u` (there is no resolvent), the predictor in `y`
/// and x_{k+1} in `z`.
template <typename Scalar>
SolveResult<Scalar> solve_korpelevich(const Space<Scalar>& space, const MonotoneOperator<Scalar>& op,
                                      const FeasibleSet<Scalar>& set, Scalar tau, const Point<Scalar>& x1,
                                      Scalar stop_tol, int max_iters) {
  if (!space.is_euclidean()) throw InvalidArgument("solve_korpelevich requires a euclidean space");
  if (!(tau > Scalar(0))) throw InvalidArgument("tau must be positive");
  if (!contains(set, x1, space.tolerance())) throw InvalidArgument("starting point is outside the feasible set");
  SolveResult<Scalar> result;
  Point<Scalar> x = x1;
  result.final_point = x;
  for (int k = 1; k <= max_iters; ++k) {
    IterationRecord<Scalar> rec;
    rec.k = k;
    rec.x = x;
    rec.u = x;
    rec.y = metric_projection(space, set, x - tau * duality_map_inverse(space, op(x)));
    Point<Scalar> x_next = metric_projection(space, set, x - tau * duality_map_inverse(space, op(rec.y)));
    rec.z = x_next;
    rec.step_norm = norm(space, x_next - x);
    const bool done = rec.step_norm <= stop_tol;
    result.trace.push_back(std::move(rec));
    x = std::move(x_next);
    result.final_point = x;
    if (done) {
      result.status = SolveStatus::converged;
      return result;
    }
  }
  result.status = SolveStatus::max_iters;
  return result;
}

}  // namespace exgrad
