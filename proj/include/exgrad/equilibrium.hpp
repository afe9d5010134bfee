#pragma once

// Bifunctions f(u, y) for the generalized equilibrium problem and the
// resolvent K_r: the unique u in C with
//   f(u, y) + <Au, y - u> + (1/r) <Ju - Jx, y - u> >= 0   for all y in C.

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <variant>

#include "exgrad/operators.hpp"
#include "exgrad/report.hpp"
#include "exgrad/sets.hpp"
#include "exgrad/space.hpp"

namespace exgrad {

namespace bif {
/// f(u, y) = a y^2 + b u y - (a + b) u^2 on R, a > 0, b >= 0.
template <typename Scalar>
struct Quadratic1d {
  Scalar a;
  Scalar b;
};
struct Zero {};
struct Custom {};
}  // namespace bif

template <typename Scalar>
class Bifunction {
 public:
  using Eval = std::function<Scalar(const Point<Scalar>&, const Point<Scalar>&)>;
  /// Derivative of y -> f(u, y) at y = u.
  using DiagonalPartial = std::function<DualPoint<Scalar>(const Point<Scalar>&)>;
  using Tag = std::variant<bif::Quadratic1d<Scalar>, bif::Zero, bif::Custom>;

  static Bifunction quadratic_1d(Scalar a, Scalar b) {
    if (!(a > Scalar(0)) || !(b >= Scalar(0))) throw InvalidArgument("quadratic_1d requires a > 0 and b >= 0");
    auto [eval, partial] = quadratic_parts(a, b);
    return Bifunction(1, bif::Quadratic1d<Scalar>{a, b}, std::move(eval), std::move(partial));
  }

  /// Same formula without the sign restrictions (used to build counterexamples).
  static Bifunction quadratic_1d_unchecked(Scalar a, Scalar b) {
    auto [eval, partial] = quadratic_parts(a, b);
    return Bifunction(1, bif::Custom{}, std::move(eval), std::move(partial));
  }

  static Bifunction zero(Index dim) {
    return Bifunction(dim, bif::Zero{}, [](const Point<Scalar>&, const Point<Scalar>&) { return Scalar(0); },
                      [dim](const Point<Scalar>&) { return DualPoint<Scalar>::zero(dim); });
  }

  static Bifunction custom(Index dim, Eval eval, std::optional<DiagonalPartial> partial = std::nullopt) {
    return Bifunction(dim, bif::Custom{}, std::move(eval), std::move(partial));
  }

  Scalar operator()(const Point<Scalar>& u, const Point<Scalar>& y) const {
    if (u.dim() != dim_ || y.dim() != dim_) throw DimensionMismatch("bifunction argument", dim_, u.dim());
    return eval_(u, y);
  }

  const std::optional<DiagonalPartial>& partial_y_at_diagonal() const noexcept { return partial_; }
  const Tag& tag() const noexcept { return tag_; }
  bool is_zero() const noexcept { return std::holds_alternative<bif::Zero>(tag_); }
  Index dim() const noexcept { return dim_; }

 private:
  Bifunction(Index dim, Tag tag, Eval eval, std::optional<DiagonalPartial> partial)
      : dim_(dim), tag_(std::move(tag)), eval_(std::move(eval)), partial_(std::move(partial)) {}

  static std::pair<Eval, DiagonalPartial> quadratic_parts(Scalar a, Scalar b) {
    Eval eval = [a, b](const Point<Scalar>& u, const Point<Scalar>& y) {
      return a * y[0] * y[0] + b * u[0] * y[0] - (a + b) * u[0] * u[0];
    };
    DiagonalPartial partial = [a, b](const Point<Scalar>& u) { return DualPoint<Scalar>{(Scalar(2) * a + b) * u[0]}; };
    return {std::move(eval), std::move(partial)};
  }

  Index dim_;
  Tag tag_;
  Eval eval_;
  std::optional<DiagonalPartial> partial_;
};

/// Everything that defines one evaluation of K_r x. Holds references; the
/// referenced objects must outlive the query.
template <typename Scalar>
struct ResolventQuery {
  const Space<Scalar>& space;
  const Bifunction<Scalar>& f;
  const MonotoneOperator<Scalar>& op;
  const FeasibleSet<Scalar>& set;
  Scalar r;
  Point<Scalar> x;
};

/// Left-hand side of the resolvent inequality at a trial y.
template <typename Scalar>
Scalar resolvent_form(const ResolventQuery<Scalar>& q, const Point<Scalar>& u, const Point<Scalar>& y) {
  const Point<Scalar> d = y - u;
  const DualPoint<Scalar> ju_jx = duality_map(q.space, u) - duality_map(q.space, q.x);
  return q.f(u, y) + pairing(q.space, q.op(u), d) + pairing(q.space, ju_jx, d) / q.r;
}

/// Closed-form K_r x for f = quadratic_1d(a, b) and A = lam * I on an
/// interval: the resolvent quadratic in y vanishes at y = u, so its
/// derivative there does too, giving u = x / (1 + r (2a + b + lam)).
template <typename Scalar>
Scalar resolvent_quadratic_1d(Scalar a, Scalar b, Scalar lam, Scalar r, Scalar lower, Scalar upper, Scalar x) {
  if (!(a > Scalar(0)) || !(b >= Scalar(0)) || !(lam >= Scalar(0)) || !(r > Scalar(0)))
    throw InvalidArgument("resolvent_quadratic_1d requires a > 0, b >= 0, lam >= 0, r > 0");
  const Scalar unconstrained = x / (Scalar(1) + r * (Scalar(2) * a + b + lam));
  if (unconstrained >= lower && unconstrained <= upper) return unconstrained;

  const Scalar u = std::clamp(unconstrained, lower, upper);
  auto form = [&](Scalar y) { return a * y * y + b * u * y - (a + b) * u * u + lam * u * (y - u) + (y - u) * (u - x) / r; };
  const Scalar slope = (Scalar(2) * a + b + lam) * u + (u - x) / r;
  const Scalar slack = Scalar(1e-12) * (Scalar(1) + std::abs(x) + std::abs(u)) / r;
  const bool endpoints_ok = (!std::isfinite(static_cast<double>(lower)) || form(lower) >= -slack) &&
                            (!std::isfinite(static_cast<double>(upper)) || form(upper) >= -slack);
  const bool slope_ok = u == upper ? slope <= slack : slope >= -slack;
  if (!endpoints_ok || !slope_ok) throw ResolventError("clamped closed-form resolvent violates the defining inequality");
  return u;
}

template <typename Scalar>
struct ResolventReport {
  Scalar max_violation = Scalar(0);
  Point<Scalar> witness;
  /// Largest magnitude of the inequality's terms seen; sets the rounding floor.
  Scalar scale = Scalar(0);
};

/// Evaluates the resolvent inequality at `samples` Halton points of C and at
/// the box corners. A sampled certificate, not a proof.
template <typename Scalar>
ResolventReport<Scalar> verify_resolvent(const Point<Scalar>& u, const ResolventQuery<Scalar>& q, int samples) {
  if (!contains(q.set, u, q.space.tolerance())) throw InvalidArgument("verify_resolvent: u is outside C");
  ResolventReport<Scalar> report{Scalar(0), u, Scalar(0)};
  const Scalar radius = Scalar(2) * std::max({Scalar(1), u.coords().norm(), q.x.coords().norm()});
  auto probe = [&](const Point<Scalar>& y) {
    const Scalar value = resolvent_form(q, u, y);
    report.scale = std::max(report.scale, std::abs(q.f(u, y)) + std::abs(value));
    if (-value > report.max_violation) {
      report.max_violation = -value;
      report.witness = y;
    }
  };
  HaltonSequence<Scalar> halton(q.space.dim());
  for (int s = 0; s < samples; ++s)
    probe(Point<Scalar>(map_unit_cube_to_set(q.set, halton.next(), u.coords(), radius)));
  for (const auto& c : box_corners(q.set)) probe(Point<Scalar>(c));
  return report;
}

template <typename Scalar>
struct ResolventOptions {
  /// Bracket width for the one-dimensional bisection.
  Scalar tol_1d = Scalar(1e-12);
  /// Relative step tolerance of the f = 0 fixed-point iteration.
  Scalar tol_fixed_point = Scalar(1e-10);
  int max_iters = 200000;
  int verify_samples = 32;
  /// Accepted violation, relative to 1 + ResolventReport::scale.
  Scalar verify_tol = Scalar(1e-9);
  /// Initial iterate of the fixed-point iteration (default: Pi_C x).
  std::optional<Point<Scalar>> start;
  ProjectionOptions<Scalar> projection;
};

namespace detail {

// f = 0: u <- Pi_C J^{-1}((1 - t) Ju + t (Jx - r A u)), t = min(1, alpha / r) / 2.
// Its fixed points are exactly the solutions of the resolvent inequality.
template <typename Scalar>
Point<Scalar> resolvent_fixed_point(const ResolventQuery<Scalar>& q, const ResolventOptions<Scalar>& opts) {
  const Scalar alpha = std::isfinite(static_cast<double>(q.op.alpha())) ? q.op.alpha() : q.r;
  const Scalar damping = Scalar(0.5) * std::min(Scalar(1), alpha / q.r);
  // Relative step test. The inequality's residual is about step / (damping * r),
  // so the threshold is tightened accordingly.
  const Scalar stop_scale = opts.tol_fixed_point * damping * std::min(Scalar(1), q.r);
  const Scalar norm_x = norm(q.space, q.x);
  const DualPoint<Scalar> jx = duality_map(q.space, q.x);
  Point<Scalar> u = opts.start ? *opts.start : generalized_projection(q.space, q.set, q.x, opts.projection);
  for (int it = 0; it < opts.max_iters; ++it) {
    const DualPoint<Scalar> target =
        (Scalar(1) - damping) * duality_map(q.space, u) + damping * (jx - q.r * q.op(u));
    Point<Scalar> next =
        generalized_projection(q.space, q.set, duality_map_inverse(q.space, target), opts.projection);
    const Scalar step = norm(q.space, next - u);
    u = std::move(next);
    const Scalar size = std::max({norm_x, norm(q.space, u), std::numeric_limits<Scalar>::min()});
    if (step <= stop_scale * size) return u;
  }
  throw ResolventError("resolvent fixed-point iteration did not converge");
}

// One dimension: R(u) = d_y f(u,u) + A u + (Ju - Jx)/r is increasing, and the
// resolvent is the root of R clamped to the interval.
template <typename Scalar>
Point<Scalar> resolvent_bisection(const ResolventQuery<Scalar>& q, const ResolventOptions<Scalar>& opts) {
  const auto& partial = *q.f.partial_y_at_diagonal();
  const Scalar jx = duality_map(q.space, q.x)[0];
  auto residual = [&](Scalar u) {
    const Point<Scalar> pu{u};
    return partial(pu)[0] + q.op(pu)[0] + (duality_map(q.space, pu)[0] - jx) / q.r;
  };
  Scalar lo = -std::numeric_limits<Scalar>::infinity();
  Scalar hi = std::numeric_limits<Scalar>::infinity();
  if (auto b = q.set.as_box()) {
    lo = b->lower[0];
    hi = b->upper[0];
  } else if (auto h = q.set.as_halfspace()) {
    const Scalar bound = h->offset / h->normal[0];
    (h->normal[0] > Scalar(0) ? hi : lo) = bound;
  }
  if (std::isfinite(static_cast<double>(lo)) && residual(lo) >= Scalar(0)) return Point<Scalar>{lo};
  if (std::isfinite(static_cast<double>(hi)) && residual(hi) <= Scalar(0)) return Point<Scalar>{hi};

  // Finite bracket with residual(a) < 0 < residual(b).
  const Scalar x0 = q.x[0];
  Scalar width = std::max(Scalar(1), std::abs(x0));
  Scalar a = std::isfinite(static_cast<double>(lo)) ? lo : x0 - width;
  while (residual(a) >= Scalar(0)) a -= (width *= Scalar(2));
  width = std::max(Scalar(1), std::abs(x0));
  Scalar b = std::isfinite(static_cast<double>(hi)) ? hi : x0 + width;
  while (residual(b) <= Scalar(0)) b += (width *= Scalar(2));

  Scalar ra = residual(a);
  Scalar rb = residual(b);
  for (int it = 0; it < 400 && b - a > opts.tol_1d; ++it) {
    const Scalar mid = a + (b - a) / Scalar(2);
    if (mid <= a || mid >= b) break;
    const Scalar rm = residual(mid);
    if (rm == Scalar(0)) return Point<Scalar>{mid};
    if (rm < Scalar(0)) {
      a = mid;
      ra = rm;
    } else {
      b = mid;
      rb = rm;
    }
  }
  // Secant through the final bracket; exact when R is affine.
  const Scalar u = std::clamp(a - ra * (b - a) / (rb - ra), a, b);
  return Point<Scalar>{u};
}

}  // namespace detail

/// Numerical K_r x. Supported: one-dimensional problems whose f declares its
/// diagonal y-derivative, and f = 0 in any dimension. The answer is verified
/// against the defining inequality before it is returned.
template <typename Scalar>
Point<Scalar> resolvent_solve(const ResolventQuery<Scalar>& q, const ResolventOptions<Scalar>& opts = {}) {
  if (!(q.r > Scalar(0))) throw InvalidArgument("resolvent parameter r must be positive");
  q.space.require_dim(q.x.dim(), "resolvent_solve");

  Point<Scalar> u;
  if (q.f.is_zero()) {
    u = detail::resolvent_fixed_point(q, opts);
  } else if (q.space.dim() == 1 && q.f.partial_y_at_diagonal()) {
    u = detail::resolvent_bisection(q, opts);
  } else {
    throw InvalidArgument("resolvent_solve supports f = 0 or one-dimensional differentiable f");
  }
  const auto report = verify_resolvent(u, q, opts.verify_samples);
  if (report.max_violation > opts.verify_tol * (Scalar(1) + report.scale))
    throw ResolventError("resolvent verification failed: violation " +
                         format_scalar(report.max_violation) + " (scale " + format_scalar(report.scale) + ") at y=" +
                         format_vector(report.witness.coords()));
  return u;
}

template <typename Scalar>
struct ResolventOutcome {
  Point<Scalar> u;
  Scalar violation = Scalar(0);
  bool closed_form = false;
};

/// K_r x by the cheapest applicable route: the quadratic closed form when the
/// data allow it, otherwise resolvent_solve. Always reports the sampled violation.
template <typename Scalar>
ResolventOutcome<Scalar> resolve(const ResolventQuery<Scalar>& q, const ResolventOptions<Scalar>& opts = {}) {
  ResolventOutcome<Scalar> out;
  const auto* quad = std::get_if<bif::Quadratic1d<Scalar>>(&q.f.tag());
  const auto lam = q.op.scalar_multiplier();
  const auto* box = q.set.as_box();
  bool done = false;
  if (quad && lam && box && q.space.dim() == 1) {
    try {
      out.u = Point<Scalar>{
          resolvent_quadratic_1d(quad->a, quad->b, *lam, q.r, box->lower[0], box->upper[0], q.x[0])};
      out.closed_form = true;
      done = true;
    } catch (const ResolventError&) {
    }
  }
  if (!done) out.u = resolvent_solve(q, opts);
  out.violation = verify_resolvent(out.u, q, opts.verify_samples).max_violation;
  return out;
}

/// Sampled checks of (A1) f(x,x) = 0, (A2) f(x,y) + f(y,x) <= 0,
/// (A3) upper semicontinuity along segments, (A4) convexity of f(x, .).
template <typename Scalar>
std::array<CheckItem, 4> check_bifunction_axioms(const Space<Scalar>& space, const Bifunction<Scalar>& f,
                                                 const FeasibleSet<Scalar>& set, int samples,
                                                 std::uint64_t seed = 42) {
  if (samples < 1) throw InvalidArgument("check_bifunction_axioms needs at least one sample");
  std::array<CheckItem, 4> items{CheckItem{"(A1) f(x,x) = 0"}, CheckItem{"(A2) f(x,y) + f(y,x) <= 0"},
                                 CheckItem{"(A3) lim_{t->0} f(tz + (1-t)x, y) <= f(x,y)"},
                                 CheckItem{"(A4) y -> f(x,y) convex"}};
  const Scalar tol = space.tolerance();
  UniformSampler<Scalar> rng(seed);
  auto record = [](CheckItem& item, Scalar violation, const std::string& witness) {
    if (violation > item.worst) {
      item.worst = static_cast<double>(violation);
      item.witness = witness;
    }
  };
  for (int s = 0; s < samples; ++s) {
    const Point<Scalar> x = random_point_in(set, rng);
    const Point<Scalar> y = random_point_in(set, rng);
    const Point<Scalar> z = random_point_in(set, rng);
    const auto where = "x=" + format_vector(x.coords()) + ", y=" + format_vector(y.coords());
    const Scalar fxy = f(x, y);
    const Scalar mag = Scalar(1) + std::abs(fxy) + std::abs(f(y, x));

    record(items[0], std::abs(f(x, x)) / (Scalar(1) + std::abs(fxy)), "x=" + format_vector(x.coords()));
    record(items[1], (fxy + f(y, x)) / mag, where);

    // Violation must shrink as t decreases.
    Scalar previous = std::numeric_limits<Scalar>::infinity();
    for (Scalar t : {Scalar(1e-2), Scalar(1e-4), Scalar(1e-6)}) {
      const Point<Scalar> xt = t * z + (Scalar(1) - t) * x;
      const Scalar violation = std::max(Scalar(0), f(xt, y) - fxy) / mag;
      if (violation > previous + tol) record(items[2], violation - previous, where + ", z=" + format_vector(z.coords()));
      previous = violation;
    }

    const Point<Scalar> mid = Scalar(0.5) * (y + z);
    record(items[3], (f(x, mid) - Scalar(0.5) * (fxy + f(x, z))) / mag,
           where + ", z=" + format_vector(z.coords()));
  }
  for (auto& item : items)
    if (item.worst > static_cast<double>(tol)) item.status = CheckStatus::fail;
  return items;
}

}  // namespace exgrad
