#pragma once

// Problem data of the extragradient scheme other than the bifunction: the
// inverse-strongly monotone operator A and the fixed-point maps T and S,
// plus sampled checkers for the hypotheses placed on them.

#include <functional>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Eigenvalues>

#include "exgrad/report.hpp"
#include "exgrad/sets.hpp"
#include "exgrad/space.hpp"

namespace exgrad {

namespace op {
struct Identity {};
template <typename Scalar>
struct Linear {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix;
};
/// A x = m x + q (coordinatewise).
template <typename Scalar>
struct ScalarAffine {
  Scalar m;
  Scalar q;
};
struct Zero {};
struct Custom {};
}  // namespace op

/// Operator A : C -> E* with declared inverse-strong-monotonicity constant
/// alpha, i.e. <Ax - Ay, x - y> >= alpha ||Ax - Ay||_*^2.
template <typename Scalar>
class MonotoneOperator {
 public:
  using Apply = std::function<DualPoint<Scalar>(const Point<Scalar>&)>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Tag = std::variant<op::Identity, op::Linear<Scalar>, op::ScalarAffine<Scalar>, op::Zero, op::Custom>;

  static MonotoneOperator identity(const Space<Scalar>& space) {
    require_euclidean(space, "identity operator");
    return MonotoneOperator(space.dim(), Scalar(1), op::Identity{},
                            [](const Point<Scalar>& x) { return DualPoint<Scalar>(x.coords()); });
  }

  /// Symmetric positive semidefinite M. alpha defaults to 1 / lambda_max(M).
  static MonotoneOperator linear(const Space<Scalar>& space, Matrix m,
                                 std::optional<Scalar> declared_alpha = std::nullopt) {
    require_euclidean(space, "linear operator");
    if (m.rows() != space.dim() || m.cols() != space.dim())
      throw DimensionMismatch("linear operator matrix", space.dim(), m.rows());
    const Scalar scale = std::max(Scalar(1), m.cwiseAbs().maxCoeff());
    if (!(m - m.transpose()).isZero(Scalar(1e-12) * scale)) throw InvalidArgument("linear operator must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -Scalar(1e-12) * scale)
      throw InvalidArgument("linear operator must be positive semidefinite");
    const Scalar lambda_max = eig.eigenvalues().maxCoeff();
    if (!(lambda_max > Scalar(0))) throw InvalidArgument("linear operator must have a positive eigenvalue");
    const Scalar alpha = declared_alpha.value_or(Scalar(1) / lambda_max);
    Apply apply = [m](const Point<Scalar>& x) { return DualPoint<Scalar>(Vector<Scalar>(m * x.coords())); };
    return MonotoneOperator(space.dim(), alpha, op::Linear<Scalar>{std::move(m)}, std::move(apply));
  }

  static MonotoneOperator scalar_affine(const Space<Scalar>& space, Scalar m, Scalar q) {
    require_euclidean(space, "scalar_affine operator");
    if (m < Scalar(0)) throw InvalidArgument("scalar_affine operator requires m >= 0");
    const Scalar alpha = m > Scalar(0) ? Scalar(1) / m : std::numeric_limits<Scalar>::infinity();
    Apply apply = [m, q](const Point<Scalar>& x) {
      return DualPoint<Scalar>(Vector<Scalar>((m * x.coords()).array() + q));
    };
    return MonotoneOperator(space.dim(), alpha, op::ScalarAffine<Scalar>{m, q}, std::move(apply));
  }

  /// The zero operator; its alpha condition is vacuous, so any declaration is accepted.
  static MonotoneOperator zero(const Space<Scalar>& space,
                               Scalar alpha = std::numeric_limits<Scalar>::infinity()) {
    const Index n = space.dim();
    return MonotoneOperator(n, alpha, op::Zero{}, [n](const Point<Scalar>&) { return DualPoint<Scalar>::zero(n); });
  }

  static MonotoneOperator custom(const Space<Scalar>& space, Apply apply, Scalar alpha) {
    return MonotoneOperator(space.dim(), alpha, op::Custom{}, std::move(apply));
  }

  DualPoint<Scalar> operator()(const Point<Scalar>& x) const {
    if (x.dim() != dim_) throw DimensionMismatch("operator argument", dim_, x.dim());
    return apply_(x);
  }

  Scalar alpha() const noexcept { return alpha_; }
  Index dim() const noexcept { return dim_; }
  const Tag& tag() const noexcept { return tag_; }
  bool is_zero() const noexcept { return std::holds_alternative<op::Zero>(tag_); }

  /// lambda with A x = lambda x when A is a multiple of the identity on R^1.
  std::optional<Scalar> scalar_multiplier() const {
    if (dim_ != 1) return std::nullopt;
    if (std::holds_alternative<op::Identity>(tag_)) return Scalar(1);
    if (std::holds_alternative<op::Zero>(tag_)) return Scalar(0);
    if (auto a = std::get_if<op::ScalarAffine<Scalar>>(&tag_); a && a->q == Scalar(0)) return a->m;
    if (auto l = std::get_if<op::Linear<Scalar>>(&tag_)) return l->matrix(0, 0);
    return std::nullopt;
  }

 private:
  MonotoneOperator(Index dim, Scalar alpha, Tag tag, Apply apply)
      : dim_(dim), alpha_(alpha), tag_(std::move(tag)), apply_(std::move(apply)) {
    if (!(alpha > Scalar(0))) throw InvalidArgument("declared alpha must be positive");
  }
  static void require_euclidean(const Space<Scalar>& space, const char* what) {
    if (!space.is_euclidean()) throw InvalidArgument(std::string(what) + " requires a euclidean space");
  }

  Index dim_;
  Scalar alpha_;
  Tag tag_;
  Apply apply_;
};

namespace fpm {
struct Identity {};
template <typename Scalar>
struct Scaling {
  Scalar t;
};
struct Custom {};
}  // namespace fpm

/// Self-map T : C -> C together with the fixed points it is declared to have.
template <typename Scalar>
class FixedPointMap {
 public:
  using Apply = std::function<Point<Scalar>(const Point<Scalar>&)>;
  using Tag = std::variant<fpm::Identity, fpm::Scaling<Scalar>, fpm::Custom>;

  static FixedPointMap identity(const Space<Scalar>& space) {
    return FixedPointMap(space.dim(), fpm::Identity{}, [](const Point<Scalar>& x) { return x; },
                         {Point<Scalar>::zero(space.dim())});
  }

  /// x -> t x with |t| <= 1; fixed point 0.
  static FixedPointMap scaling(const Space<Scalar>& space, Scalar t) {
    if (!space.is_euclidean()) throw InvalidArgument("scaling map requires a euclidean space");
    if (!(std::abs(t) <= Scalar(1))) throw InvalidArgument("scaling map requires |t| <= 1");
    return FixedPointMap(space.dim(), fpm::Scaling<Scalar>{t}, [t](const Point<Scalar>& x) { return t * x; },
                         {Point<Scalar>::zero(space.dim())});
  }

  static FixedPointMap custom(const Space<Scalar>& space, Apply apply, std::vector<Point<Scalar>> fixed_points) {
    return FixedPointMap(space.dim(), fpm::Custom{}, std::move(apply), std::move(fixed_points));
  }

  Point<Scalar> operator()(const Point<Scalar>& x) const {
    if (x.dim() != dim_) throw DimensionMismatch("map argument", dim_, x.dim());
    return apply_(x);
  }

  /// Sample of F(T) used by the checkers. The identity map fixes everything;
  /// the origin stands in for it.
  const std::vector<Point<Scalar>>& known_fixed_points() const noexcept { return fixed_points_; }
  const Tag& tag() const noexcept { return tag_; }
  bool is_identity() const noexcept { return std::holds_alternative<fpm::Identity>(tag_); }
  Index dim() const noexcept { return dim_; }

 private:
  FixedPointMap(Index dim, Tag tag, Apply apply, std::vector<Point<Scalar>> fixed_points)
      : dim_(dim), tag_(std::move(tag)), apply_(std::move(apply)), fixed_points_(std::move(fixed_points)) {
    for (const auto& p : fixed_points_)
      if (p.dim() != dim_) throw DimensionMismatch("declared fixed point", dim_, p.dim());
  }

  Index dim_;
  Tag tag_;
  Apply apply_;
  std::vector<Point<Scalar>> fixed_points_;
};

template <typename Scalar>
DualPoint<Scalar> apply_operator(const Space<Scalar>& space, const MonotoneOperator<Scalar>& a,
                                 const Point<Scalar>& x) {
  space.require_dim(x.dim(), "apply_operator");
  return a(x);
}

/// Evaluates T x and enforces the declared range T(C) in C.
template <typename Scalar>
Point<Scalar> apply_map(const Space<Scalar>& space, const FixedPointMap<Scalar>& t, const FeasibleSet<Scalar>& set,
                        const Point<Scalar>& x) {
  space.require_dim(x.dim(), "apply_map");
  Point<Scalar> y = t(x);
  if (!contains(set, y, space.tolerance()))
    throw MapRangeError("fixed-point map left the feasible set at " + format_vector(x.coords()) + " -> " +
                        format_vector(y.coords()));
  return y;
}

template <typename Scalar>
struct AlphaEstimate {
  /// Smallest sampled <Ax-Ay, x-y> / ||Ax-Ay||_*^2; +inf if A was constant on every pair.
  Scalar value = std::numeric_limits<Scalar>::infinity();
  int pairs_used = 0;
  Scalar declared = Scalar(0);
  /// The declared alpha exceeds what the samples allow.
  bool declared_exceeds = false;

  bool constant_operator() const { return pairs_used == 0; }
};

/// Empirical upper bound on the inverse-strong-monotonicity constant. Half
/// of the pairs differ in a single coordinate, which exposes the extremal
/// ratio of diagonal linear operators exactly.
template <typename Scalar>
AlphaEstimate<Scalar> estimate_alpha(const Space<Scalar>& space, const MonotoneOperator<Scalar>& a,
                                     const FeasibleSet<Scalar>& set, int samples, std::uint64_t seed = 42) {
  if (samples < 2) throw InvalidArgument("estimate_alpha needs at least two samples");
  UniformSampler<Scalar> rng(seed);
  AlphaEstimate<Scalar> out;
  out.declared = a.alpha();
  auto consider = [&](const Point<Scalar>& x, const Point<Scalar>& y) {
    const DualPoint<Scalar> d = a(x) - a(y);
    const Scalar dn = dual_norm(space, d);
    if (!(dn > Scalar(1e-150))) return;
    out.value = std::min(out.value, pairing(space, d, x - y) / (dn * dn));
    ++out.pairs_used;
  };
  for (int s = 0; s < samples; ++s) {
    const Point<Scalar> x = random_point_in(set, rng);
    consider(x, random_point_in(set, rng));
    Vector<Scalar> moved = x.coords();
    const auto axis = static_cast<Index>(s % space.dim());
    moved[axis] = random_point_in(set, rng)[axis];
    const Point<Scalar> y(detail::coordinate_projection(set, moved));
    consider(x, y);
  }
  const Scalar slack = space.tolerance() * std::max(Scalar(1), out.value);
  out.declared_exceeds = out.pairs_used > 0 && out.declared > out.value + slack;
  return out;
}

/// Checks phi(p, Tx) <= phi(p, x) for every declared fixed point p and sampled
/// x in C. The asymptotic half of relative nonexpansiveness is not finitely
/// checkable and is reported as assumed.
template <typename Scalar>
std::vector<CheckItem> check_relatively_nonexpansive(const Space<Scalar>& space, const FixedPointMap<Scalar>& t,
                                                     const FeasibleSet<Scalar>& set, int samples,
                                                     std::uint64_t seed = 42, const std::string& label = "T") {
  if (t.known_fixed_points().empty()) throw InvalidArgument(label + ": no declared fixed points");
  const Scalar tol = space.tolerance();
  for (const auto& p : t.known_fixed_points())
    if (norm(space, t(p) - p) > tol * (Scalar(1) + norm(space, p)))
      throw InvalidArgument(label + ": declared fixed point " + format_vector(p.coords()) + " is not fixed");

  CheckItem phi_item{label + ": phi(p," + label + "x) <= phi(p,x)"};
  UniformSampler<Scalar> rng(seed);
  Scalar worst_rel(0);
  for (int s = 0; s < samples; ++s) {
    const Point<Scalar> x = random_point_in(set, rng);
    const Point<Scalar> tx = t(x);
    if (!contains(set, tx, tol)) {
      phi_item.status = CheckStatus::fail;
      phi_item.witness = label + " maps " + format_vector(x.coords()) + " outside C";
      break;
    }
    for (const auto& p : t.known_fixed_points()) {
      const Scalar before = lyapunov(space, p, x);
      const Scalar after = lyapunov(space, p, tx);
      const Scalar excess = (after - before) / (Scalar(1) + before);
      if (excess > worst_rel) {
        worst_rel = excess;
        phi_item.witness = "x=" + format_vector(x.coords()) + ", p=" + format_vector(p.coords());
      }
    }
  }
  phi_item.worst = static_cast<double>(worst_rel);
  if (worst_rel > tol) phi_item.status = CheckStatus::fail;

  CheckItem asymptotic{label + ": asymptotic fixed points coincide with F(" + label + ")", CheckStatus::pass, 0.0, "",
                       "assumed, not finitely checkable"};
  return {phi_item, asymptotic};
}

/// Checks ||Ax||_* <= ||Ax - A(solution)||_* on sampled x in C.
template <typename Scalar>
CheckItem check_norm_domination(const Space<Scalar>& space, const MonotoneOperator<Scalar>& a,
                                const Point<Scalar>& solution, const FeasibleSet<Scalar>& set, int samples,
                                std::uint64_t seed = 42) {
  CheckItem item{"norm domination ||Ax|| <= ||Ax - Au||"};
  const DualPoint<Scalar> au = a(solution);
  UniformSampler<Scalar> rng(seed);
  Scalar worst(0);
  for (int s = 0; s < samples; ++s) {
    const Point<Scalar> x = random_point_in(set, rng);
    const DualPoint<Scalar> ax = a(x);
    const Scalar lhs = dual_norm(space, ax);
    const Scalar rhs = dual_norm(space, ax - au);
    const Scalar excess = (lhs - rhs) / (Scalar(1) + rhs);
    if (excess > worst) {
      worst = excess;
      item.witness = "x=" + format_vector(x.coords());
    }
  }
  item.worst = static_cast<double>(worst);
  if (worst > space.tolerance()) item.status = CheckStatus::fail;
  return item;
}

}  // namespace exgrad
