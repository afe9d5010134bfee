#pragma once

// Finite-dimensional Banach-space geometry: Euclidean space and l_p^n with
// 1 < p <= 2. Points of E and of its dual E* are distinct types; the duality
// map and its inverse are the only conversions between them.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "exgrad/error.hpp"

namespace exgrad {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct PrimalSide {};
struct DualSide {};

/// Coordinate vector tagged with the side of the duality it lives on.
/// Arithmetic is closed within one side; mixing sides does not compile.
template <typename Scalar, typename Side>
class Coordinates {
 public:
  using scalar_type = Scalar;
  using vector_type = Vector<Scalar>;

  Coordinates() = default;
  explicit Coordinates(vector_type coords) : coords_(std::move(coords)) {
    if (!coords_.allFinite()) throw InvalidArgument("coordinates must be finite");
  }
  Coordinates(std::initializer_list<Scalar> values) : coords_(static_cast<Index>(values.size())) {
    Index i = 0;
    for (Scalar v : values) coords_[i++] = v;
    if (!coords_.allFinite()) throw InvalidArgument("coordinates must be finite");
  }

  static Coordinates zero(Index dim) { return Coordinates(vector_type::Zero(dim)); }

  const vector_type& coords() const noexcept { return coords_; }
  Index dim() const noexcept { return coords_.size(); }
  Scalar operator[](Index i) const { return coords_[i]; }

  Coordinates& operator+=(const Coordinates& other) {
    coords_ += other.coords_;
    return *this;
  }
  Coordinates& operator-=(const Coordinates& other) {
    coords_ -= other.coords_;
    return *this;
  }

  friend Coordinates operator+(const Coordinates& a, const Coordinates& b) {
    return Coordinates(vector_type(a.coords_ + b.coords_));
  }
  friend Coordinates operator-(const Coordinates& a, const Coordinates& b) {
    return Coordinates(vector_type(a.coords_ - b.coords_));
  }
  friend Coordinates operator-(const Coordinates& a) { return Coordinates(vector_type(-a.coords_)); }
  friend Coordinates operator*(Scalar s, const Coordinates& a) {
    return Coordinates(vector_type(s * a.coords_));
  }
  friend Coordinates operator*(const Coordinates& a, Scalar s) { return s * a; }
  friend bool operator==(const Coordinates& a, const Coordinates& b) {
    return a.coords_.size() == b.coords_.size() && a.coords_ == b.coords_;
  }

 private:
  vector_type coords_;
};

template <typename Scalar>
using Point = Coordinates<Scalar, PrimalSide>;
template <typename Scalar>
using DualPoint = Coordinates<Scalar, DualSide>;

enum class SpaceKind { euclidean, lp };

/// Geometry of a finite-dimensional space.
///
/// `c` is the 2-uniform-convexity constant (the modulus of convexity is
/// bounded below by c * eps^2 up to the usual normalisation). It is supplied
/// by the caller; for l_p with 1 < p <= 2 the literature value is sqrt(p - 1).
/// Euclidean spaces always have c = 1.
template <typename Scalar>
class Space {
 public:
  static Space euclidean(Index dim, Scalar geometry_tol = Scalar(1e-9)) {
    return Space(SpaceKind::euclidean, dim, Scalar(2), Scalar(1), geometry_tol);
  }
  static Space lp(Index dim, Scalar p, Scalar c, Scalar geometry_tol = Scalar(1e-9)) {
    return Space(SpaceKind::lp, dim, p, c, geometry_tol);
  }

  SpaceKind kind() const noexcept { return kind_; }
  bool is_euclidean() const noexcept { return kind_ == SpaceKind::euclidean; }
  Index dim() const noexcept { return dim_; }
  /// Exponent of the primal norm (2 for Euclidean).
  Scalar p() const noexcept { return p_; }
  /// Conjugate exponent, 1/p + 1/q = 1.
  Scalar q() const noexcept { return p_ / (p_ - Scalar(1)); }
  Scalar c() const noexcept { return c_; }
  Scalar tolerance() const noexcept { return tol_; }

  void require_dim(Index n, std::string_view what) const {
    if (n != dim_) throw DimensionMismatch(what, static_cast<long>(dim_), static_cast<long>(n));
  }

  friend bool operator==(const Space& a, const Space& b) {
    return a.kind_ == b.kind_ && a.dim_ == b.dim_ && a.p_ == b.p_ && a.c_ == b.c_;
  }

 private:
  Space(SpaceKind kind, Index dim, Scalar p, Scalar c, Scalar tol)
      : kind_(kind), dim_(dim), p_(p), c_(c), tol_(tol) {
    if (dim < 1) throw InvalidArgument("space dimension must be >= 1");
    if (kind == SpaceKind::lp && !(p > Scalar(1) && p <= Scalar(2)))
      throw InvalidArgument("l_p space requires 1 < p <= 2");
    if (!(c > Scalar(0) && c <= Scalar(1))) throw InvalidArgument("convexity constant c must lie in (0, 1]");
    if (!(tol > Scalar(0))) throw InvalidArgument("geometry tolerance must be positive");
  }

  SpaceKind kind_;
  Index dim_;
  Scalar p_;
  Scalar c_;
  Scalar tol_;
};

namespace detail {

// Overflow-safe (sum |v_i|^e)^(1/e).
template <typename Scalar>
Scalar power_norm(const Vector<Scalar>& v, Scalar e) {
  using std::abs;
  using std::pow;
  const Scalar m = v.size() == 0 ? Scalar(0) : v.cwiseAbs().maxCoeff();
  if (m == Scalar(0)) return Scalar(0);
  Scalar sum(0);
  for (Index i = 0; i < v.size(); ++i) sum += pow(abs(v[i]) / m, e);
  return m * pow(sum, Scalar(1) / e);
}

// Gradient of (1/2) ||v||_e^2: ||v||^(2-e) * sign(v_i) |v_i|^(e-1), extended by
// continuity with value 0 at v = 0. Positively homogeneous of degree one.
template <typename Scalar>
Vector<Scalar> power_duality(const Vector<Scalar>& v, Scalar e) {
  using std::abs;
  using std::pow;
  Vector<Scalar> out = Vector<Scalar>::Zero(v.size());
  const Scalar m = v.size() == 0 ? Scalar(0) : v.cwiseAbs().maxCoeff();
  if (m == Scalar(0)) return out;
  const Vector<Scalar> w = v / m;
  const Scalar wn = power_norm<Scalar>(w, e);
  const Scalar scale = m * pow(wn, Scalar(2) - e);
  for (Index i = 0; i < v.size(); ++i) {
    if (w[i] == Scalar(0)) continue;
    const Scalar mag = pow(abs(w[i]), e - Scalar(1));
    out[i] = scale * (w[i] > Scalar(0) ? mag : -mag);
  }
  return out;
}

}  // namespace detail

template <typename Scalar>
Scalar norm(const Space<Scalar>& space, const Point<Scalar>& x) {
  space.require_dim(x.dim(), "norm");
  if (space.is_euclidean()) return x.coords().norm();
  return detail::power_norm<Scalar>(x.coords(), space.p());
}

template <typename Scalar>
Scalar dual_norm(const Space<Scalar>& space, const DualPoint<Scalar>& xs) {
  space.require_dim(xs.dim(), "dual_norm");
  if (space.is_euclidean()) return xs.coords().norm();
  return detail::power_norm<Scalar>(xs.coords(), space.q());
}

/// <xs, y>
template <typename Scalar>
Scalar pairing(const Space<Scalar>& space, const DualPoint<Scalar>& xs, const Point<Scalar>& y) {
  space.require_dim(xs.dim(), "pairing");
  space.require_dim(y.dim(), "pairing");
  return xs.coords().dot(y.coords());
}

/// Normalized duality map J. Single-valued because every supported space is
/// smooth and strictly convex.
template <typename Scalar>
DualPoint<Scalar> duality_map(const Space<Scalar>& space, const Point<Scalar>& x) {
  space.require_dim(x.dim(), "duality_map");
  if (space.is_euclidean()) return DualPoint<Scalar>(x.coords());
  return DualPoint<Scalar>(detail::power_duality<Scalar>(x.coords(), space.p()));
}

/// J^{-1}, which is the duality map of the dual space (exponent q).
template <typename Scalar>
Point<Scalar> duality_map_inverse(const Space<Scalar>& space, const DualPoint<Scalar>& xs) {
  space.require_dim(xs.dim(), "duality_map_inverse");
  if (space.is_euclidean()) return Point<Scalar>(xs.coords());
  return Point<Scalar>(detail::power_duality<Scalar>(xs.coords(), space.q()));
}

/// phi(x, y) = ||x||^2 - 2 <Jy, x> + ||y||^2.
template <typename Scalar>
Scalar lyapunov(const Space<Scalar>& space, const Point<Scalar>& x, const Point<Scalar>& y) {
  space.require_dim(x.dim(), "lyapunov");
  space.require_dim(y.dim(), "lyapunov");
  if (space.is_euclidean()) return (x.coords() - y.coords()).squaredNorm();
  const Scalar nx = norm(space, x);
  const Scalar ny = norm(space, y);
  const Scalar value = nx * nx - Scalar(2) * pairing(space, duality_map(space, y), x) + ny * ny;
  return std::max(Scalar(0), value);
}

/// V(x, xs) = ||x||^2 - 2 <xs, x> + ||xs||_*^2 = phi(x, J^{-1} xs).
template <typename Scalar>
Scalar v_functional(const Space<Scalar>& space, const Point<Scalar>& x, const DualPoint<Scalar>& xs) {
  const Scalar nx = norm(space, x);
  const Scalar ns = dual_norm(space, xs);
  return nx * nx - Scalar(2) * pairing(space, xs, x) + ns * ns;
}

}  // namespace exgrad
