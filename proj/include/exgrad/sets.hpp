#pragma once

// Closed convex feasible sets (box, halfspace, whole space), the Euclidean
// metric projection and the generalized projection Pi_C x = argmin_{y in C} phi(y, x).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "exgrad/error.hpp"
#include "exgrad/sampling.hpp"
#include "exgrad/space.hpp"

namespace exgrad {

template <typename Scalar>
struct Box {
  Vector<Scalar> lower;
  Vector<Scalar> upper;
};

/// { x : <normal, x> <= offset }
template <typename Scalar>
struct Halfspace {
  DualPoint<Scalar> normal;
  Scalar offset;
};

struct WholeSpace {
  Index dim;
};

template <typename Scalar>
class FeasibleSet {
 public:
  using variant_type = std::variant<Box<Scalar>, Halfspace<Scalar>, WholeSpace>;

  static FeasibleSet box(Vector<Scalar> lower, Vector<Scalar> upper) {
    if (lower.size() != upper.size() || lower.size() < 1)
      throw InvalidArgument("box bounds must have equal, positive length");
    for (Index i = 0; i < lower.size(); ++i) {
      if (std::isnan(static_cast<double>(lower[i])) || std::isnan(static_cast<double>(upper[i])))
        throw InvalidArgument("box bounds must not be NaN");
      if (lower[i] > upper[i]) throw InvalidArgument("box is empty: lower > upper");
      if (lower[i] == std::numeric_limits<Scalar>::infinity() ||
          upper[i] == -std::numeric_limits<Scalar>::infinity())
        throw InvalidArgument("box is empty: infinite bound on the wrong side");
    }
    return FeasibleSet(Box<Scalar>{std::move(lower), std::move(upper)});
  }
  static FeasibleSet interval(Scalar lower, Scalar upper) {
    return box(Vector<Scalar>::Constant(1, lower), Vector<Scalar>::Constant(1, upper));
  }
  static FeasibleSet halfspace(DualPoint<Scalar> normal, Scalar offset) {
    if (normal.coords().isZero(0)) throw InvalidArgument("halfspace normal must be nonzero");
    if (!std::isfinite(static_cast<double>(offset))) throw InvalidArgument("halfspace offset must be finite");
    return FeasibleSet(Halfspace<Scalar>{std::move(normal), offset});
  }
  static FeasibleSet whole(Index dim) {
    if (dim < 1) throw InvalidArgument("dimension must be >= 1");
    return FeasibleSet(WholeSpace{dim});
  }

  const variant_type& variant() const noexcept { return set_; }
  const Box<Scalar>* as_box() const noexcept { return std::get_if<Box<Scalar>>(&set_); }
  const Halfspace<Scalar>* as_halfspace() const noexcept { return std::get_if<Halfspace<Scalar>>(&set_); }
  bool is_whole() const noexcept { return std::holds_alternative<WholeSpace>(set_); }

  Index dim() const {
    if (auto b = as_box()) return b->lower.size();
    if (auto h = as_halfspace()) return h->normal.dim();
    return std::get<WholeSpace>(set_).dim;
  }

  bool is_bounded() const {
    auto b = as_box();
    return b && b->lower.allFinite() && b->upper.allFinite();
  }

 private:
  explicit FeasibleSet(variant_type set) : set_(std::move(set)) {}
  variant_type set_;
};

template <typename Scalar>
bool contains(const FeasibleSet<Scalar>& set, const Point<Scalar>& x, Scalar tol) {
  if (x.dim() != set.dim()) throw DimensionMismatch("contains", set.dim(), x.dim());
  if (auto b = set.as_box()) {
    for (Index i = 0; i < x.dim(); ++i)
      if (x[i] < b->lower[i] - tol || x[i] > b->upper[i] + tol) return false;
    return true;
  }
  if (auto h = set.as_halfspace()) return h->normal.coords().dot(x.coords()) <= h->offset + tol;
  return true;
}

namespace detail {

// Orthogonal projection in coordinates. Membership of every set variant is
// defined coordinatewise, so the result lies in the set in any geometry.
template <typename Scalar>
Vector<Scalar> coordinate_projection(const FeasibleSet<Scalar>& set, const Vector<Scalar>& x) {
  if (auto b = set.as_box()) return x.cwiseMax(b->lower).cwiseMin(b->upper);
  if (auto h = set.as_halfspace()) {
    const Vector<Scalar>& n = h->normal.coords();
    const Scalar excess = n.dot(x) - h->offset;
    if (excess <= Scalar(0)) return x;
    return x - (excess / n.squaredNorm()) * n;
  }
  return x;
}

}  // namespace detail

/// Euclidean nearest-point projection; only meaningful in a Hilbert space.
template <typename Scalar>
Point<Scalar> metric_projection(const Space<Scalar>& space, const FeasibleSet<Scalar>& set,
                                const Point<Scalar>& x) {
  if (!space.is_euclidean())
    throw InvalidArgument("metric_projection requires a euclidean space; use generalized_projection");
  space.require_dim(x.dim(), "metric_projection");
  space.require_dim(set.dim(), "metric_projection (set)");
  return Point<Scalar>(detail::coordinate_projection(set, x.coords()));
}

enum class ProjectionMethod {
  /// Projected gradient on y -> ||y||^2 - 2<Jx, y> with Armijo backtracking.
  projected_gradient,
  /// Exact KKT solve: bisection on the norm (box) or on the multiplier (halfspace).
  dual_bisection,
};

template <typename Scalar>
struct ProjectionOptions {
  Scalar tol = Scalar(1e-10);
  int max_iters = 10000;
  ProjectionMethod method = ProjectionMethod::dual_bisection;
};

template <typename Scalar>
struct ProjectionResult {
  Point<Scalar> point;
  /// Projected-gradient norm of phi(., x) at `point`; 0 on exact paths.
  Scalar residual = Scalar(0);
  int iterations = 0;
};

/// Raised when the inner minimizer misses its tolerance; carries the best iterate.
template <typename Scalar>
class ProjectionError : public ConvergenceError {
 public:
  ProjectionError(const std::string& what, Point<Scalar> best, Scalar residual)
      : ConvergenceError(what, static_cast<double>(residual)), best_(std::move(best)) {}
  const Point<Scalar>& best() const noexcept { return best_; }

 private:
  Point<Scalar> best_;
};

namespace detail {

template <typename Scalar>
Vector<Scalar> projected_gradient_step(const FeasibleSet<Scalar>& set, const Vector<Scalar>& y,
                                       const Vector<Scalar>& grad) {
  return y - coordinate_projection(set, Vector<Scalar>(y - grad));
}

template <typename Scalar>
ProjectionResult<Scalar> projected_gradient_projection(const Space<Scalar>& space,
                                                       const FeasibleSet<Scalar>& set,
                                                       const Point<Scalar>& x,
                                                       const ProjectionOptions<Scalar>& opts) {
  const Vector<Scalar> w = duality_map(space, x).coords();
  auto objective = [&](const Vector<Scalar>& y) {
    const Scalar n = detail::power_norm<Scalar>(y, space.p());
    return n * n - Scalar(2) * w.dot(y);
  };
  auto gradient = [&](const Vector<Scalar>& y) {
    return Vector<Scalar>(Scalar(2) * (detail::power_duality<Scalar>(y, space.p()) - w));
  };

  const Scalar scale = std::max(Scalar(1), x.coords().norm());
  Vector<Scalar> y = coordinate_projection(set, x.coords());
  Scalar fy = objective(y);
  Vector<Scalar> g = gradient(y);
  Scalar residual = projected_gradient_step(set, y, g).norm();
  Scalar step(0.5);
  int it = 0;
  for (; it < opts.max_iters && residual > opts.tol * scale; ++it) {
    step = std::min(Scalar(2) * step, Scalar(1e6));
    Vector<Scalar> trial;
    Scalar ft(0);
    bool accepted = false;
    while (step > Scalar(1e-30)) {
      trial = coordinate_projection(set, Vector<Scalar>(y - step * g));
      ft = objective(trial);
      if (ft <= fy + Scalar(1e-4) * g.dot(trial - y)) {
        accepted = true;
        break;
      }
      step /= Scalar(2);
    }
    if (!accepted) break;  // no representable decrease left
    y = std::move(trial);
    fy = ft;
    g = gradient(y);
    residual = projected_gradient_step(set, y, g).norm();
  }
  if (residual > opts.tol * scale)
    throw ProjectionError<Scalar>("generalized projection did not converge", Point<Scalar>(y), residual);
  return {Point<Scalar>(std::move(y)), residual, it};
}

// sign(v)|v|^e
template <typename Scalar>
Scalar signed_power(Scalar v, Scalar e) {
  using std::abs;
  using std::pow;
  if (v == Scalar(0)) return Scalar(0);
  const Scalar m = pow(abs(v), e);
  return v > Scalar(0) ? m : -m;
}

// Box KKT: with s = ||z||, z_i = clamp((w_i / s^(2-p))^(q-1)). The map
// s -> ||z(s)|| is nonincreasing, so s - ||z(s)|| has a unique root.
template <typename Scalar>
Vector<Scalar> box_projection_bisection(const Space<Scalar>& space, const Box<Scalar>& box,
                                        const Vector<Scalar>& w) {
  const Scalar p = space.p();
  const Scalar q = space.q();
  auto candidate = [&](Scalar s) {
    Vector<Scalar> z(w.size());
    const Scalar denom = std::pow(s, Scalar(2) - p);
    for (Index i = 0; i < w.size(); ++i)
      z[i] = std::clamp(signed_power(w[i] / denom, q - Scalar(1)), box.lower[i], box.upper[i]);
    return z;
  };
  auto gap = [&](Scalar s) { return detail::power_norm<Scalar>(candidate(s), p) - s; };

  Scalar hi = std::max(Scalar(1), detail::power_norm<Scalar>(w, q));
  while (gap(hi) > Scalar(0)) hi *= Scalar(2);
  Scalar lo = hi / Scalar(2);
  while (gap(lo) <= Scalar(0)) {
    lo /= Scalar(2);
    if (lo < std::numeric_limits<Scalar>::min()) return candidate(lo);
  }
  for (int i = 0; i < 400; ++i) {
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    if (mid <= lo || mid >= hi) break;
    (gap(mid) > Scalar(0) ? lo : hi) = mid;
  }
  return candidate(lo + (hi - lo) / Scalar(2));
}

// Halfspace KKT: Jz = Jx - mu n, mu >= 0; mu -> <n, J^{-1}(Jx - mu n)> is nonincreasing.
template <typename Scalar>
Vector<Scalar> halfspace_projection_bisection(const Space<Scalar>& space, const Halfspace<Scalar>& h,
                                              const Vector<Scalar>& w) {
  const Vector<Scalar>& n = h.normal.coords();
  auto primal = [&](Scalar mu) { return detail::power_duality<Scalar>(Vector<Scalar>(w - mu * n), space.q()); };
  auto excess = [&](Scalar mu) { return n.dot(primal(mu)) - h.offset; };
  Scalar lo(0);
  Scalar hi(1);
  while (excess(hi) > Scalar(0)) {
    lo = hi;
    hi *= Scalar(2);
  }
  for (int i = 0; i < 400; ++i) {
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    if (mid <= lo || mid >= hi) break;
    (excess(mid) > Scalar(0) ? lo : hi) = mid;
  }
  // hi is feasible by construction; snap onto the set to absorb rounding.
  return coordinate_projection(FeasibleSet<Scalar>::halfspace(h.normal, h.offset), primal(hi));
}

}  // namespace detail

/// Generalized projection with diagnostics. Euclidean spaces, members of the
/// set, the whole space and one-dimensional intervals take exact paths.
template <typename Scalar>
ProjectionResult<Scalar> generalized_projection_detailed(const Space<Scalar>& space,
                                                         const FeasibleSet<Scalar>& set,
                                                         const Point<Scalar>& x,
                                                         const ProjectionOptions<Scalar>& opts = {}) {
  if (!(opts.tol > Scalar(0))) throw InvalidArgument("projection tolerance must be positive");
  space.require_dim(x.dim(), "generalized_projection");
  space.require_dim(set.dim(), "generalized_projection (set)");
  if (space.is_euclidean()) return {metric_projection(space, set, x), Scalar(0), 0};
  if (set.is_whole() || contains(set, x, Scalar(0))) return {x, Scalar(0), 0};
  // In one dimension J is an increasing bijection of R, so Pi_C is the clamp.
  if (space.dim() == 1) return {Point<Scalar>(detail::coordinate_projection(set, x.coords())), Scalar(0), 0};

  if (opts.method == ProjectionMethod::projected_gradient)
    return detail::projected_gradient_projection(space, set, x, opts);

  const Vector<Scalar> w = duality_map(space, x).coords();
  Vector<Scalar> z = set.as_box() ? detail::box_projection_bisection(space, *set.as_box(), w)
                                  : detail::halfspace_projection_bisection(space, *set.as_halfspace(), w);
  return {Point<Scalar>(std::move(z)), Scalar(0), 0};
}

template <typename Scalar>
Point<Scalar> generalized_projection(const Space<Scalar>& space, const FeasibleSet<Scalar>& set,
                                     const Point<Scalar>& x, const ProjectionOptions<Scalar>& opts = {}) {
  return generalized_projection_detailed(space, set, x, opts).point;
}

/// Maps a point of the unit cube into the set. Unbounded directions are
/// truncated to a window of half-width `radius` around `center`.
template <typename Scalar>
Vector<Scalar> map_unit_cube_to_set(const FeasibleSet<Scalar>& set, const Vector<Scalar>& unit,
                                    const Vector<Scalar>& center, Scalar radius) {
  Vector<Scalar> lo = center.array() - radius;
  Vector<Scalar> hi = center.array() + radius;
  if (auto b = set.as_box()) {
    for (Index i = 0; i < unit.size(); ++i) {
      lo[i] = std::isfinite(static_cast<double>(b->lower[i])) ? b->lower[i] : std::min(lo[i], b->upper[i] - radius);
      hi[i] = std::isfinite(static_cast<double>(b->upper[i])) ? b->upper[i] : std::max(hi[i], lo[i] + radius);
    }
  }
  Vector<Scalar> y = lo.array() + unit.array() * (hi - lo).array();
  return detail::coordinate_projection(set, y);
}

/// Seeded random point of the set (unbounded sets: window of half-width
/// `radius` around the origin).
template <typename Scalar>
Point<Scalar> random_point_in(const FeasibleSet<Scalar>& set, UniformSampler<Scalar>& sampler,
                              Scalar radius = Scalar(10)) {
  const Vector<Scalar> center = Vector<Scalar>::Zero(set.dim());
  return Point<Scalar>(map_unit_cube_to_set(set, sampler.unit_cube(set.dim()), center, radius));
}

/// Corners of a bounded box (empty for other sets or dim > 12).
template <typename Scalar>
std::vector<Vector<Scalar>> box_corners(const FeasibleSet<Scalar>& set) {
  std::vector<Vector<Scalar>> out;
  if (!set.is_bounded() || set.dim() > 12) return out;
  const auto& b = *set.as_box();
  const Index n = set.dim();
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    Vector<Scalar> c(n);
    for (Index i = 0; i < n; ++i) c[i] = (mask >> i) & 1u ? b.upper[i] : b.lower[i];
    out.push_back(std::move(c));
  }
  return out;
}

/// max over sampled y in C of <Jx - Jz, y - z>, clipped at 0. Certifies
/// z = Pi_C x when small. Samples are deterministic (Halton) plus box corners.
template <typename Scalar>
Scalar projection_residual(const Space<Scalar>& space, const FeasibleSet<Scalar>& set, const Point<Scalar>& x,
                           const Point<Scalar>& z, int samples) {
  if (!contains(set, z, space.tolerance())) throw InvalidArgument("projection_residual: z is outside the set");
  const Vector<Scalar> diff = (duality_map(space, x) - duality_map(space, z)).coords();
  const Scalar radius = Scalar(2) * std::max({Scalar(1), x.coords().norm(), z.coords().norm()});
  Scalar worst(0);
  auto probe = [&](const Vector<Scalar>& y) { worst = std::max(worst, diff.dot(y - z.coords())); };
  HaltonSequence<Scalar> halton(space.dim());
  for (int s = 0; s < samples; ++s) probe(map_unit_cube_to_set(set, halton.next(), z.coords(), radius));
  for (const auto& c : box_corners(set)) probe(c);
  return worst;
}

}  // namespace exgrad
