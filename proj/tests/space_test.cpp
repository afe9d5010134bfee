#include <gtest/gtest.h>

#include <cmath>
#include <type_traits>

#include "exgrad/sampling.hpp"
#include "exgrad/space.hpp"

namespace exgrad {
namespace {

using Sp = Space<double>;
using P = Point<double>;
using D = DualPoint<double>;

// Straight-from-the-definition evaluations in long double.
long double lp_norm_ld(const Vector<double>& v, long double p) {
  long double s = 0;
  for (Index i = 0; i < v.size(); ++i) s += std::pow(std::fabs(static_cast<long double>(v[i])), p);
  return std::pow(s, 1 / p);
}

Vector<long double> duality_ld(const Vector<double>& v, long double p) {
  Vector<long double> out(v.size());
  const long double n = lp_norm_ld(v, p);
  for (Index i = 0; i < v.size(); ++i) {
    const long double x = v[i];
    out[i] = x == 0 ? 0 : std::pow(n, 2 - p) * std::pow(std::fabs(x), p - 1) * (x < 0 ? -1 : 1);
  }
  return out;
}

long double phi_ld(const Vector<double>& x, const Vector<double>& y, long double p) {
  const auto jy = duality_ld(y, p);
  long double pair = 0;
  for (Index i = 0; i < x.size(); ++i) pair += static_cast<long double>(x[i]) * jy[i];
  const long double nx = lp_norm_ld(x, p), ny = lp_norm_ld(y, p);
  return nx * nx - 2 * pair + ny * ny;
}

P random_point(UniformSampler<double>& rng, Index n, double scale = 5.0) {
  Vector<double> v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.uniform(-scale, scale);
  return P(v);
}

TEST(Space, RejectsBadParameters) {
  EXPECT_THROW(Sp::euclidean(0), InvalidArgument);
  EXPECT_THROW(Sp::lp(3, 1.0, 0.5), InvalidArgument);
  EXPECT_THROW(Sp::lp(3, 2.5, 0.5), InvalidArgument);
  EXPECT_THROW(Sp::lp(3, 1.5, 0.0), InvalidArgument);
  EXPECT_THROW(Sp::lp(3, 1.5, 1.2), InvalidArgument);
  EXPECT_NO_THROW(Sp::lp(3, 2.0, 1.0));
  EXPECT_EQ(Sp::euclidean(2).c(), 1.0);
}

TEST(Space, PrimalAndDualPointsDoNotMix) {
  static_assert(!std::is_convertible_v<P, D>);
  static_assert(!std::is_convertible_v<D, P>);
  static_assert(!std::is_constructible_v<P, D>);
}

TEST(Space, NonFiniteCoordinatesRejected) {
  Vector<double> v(2);
  v << 1.0, std::nan("");
  EXPECT_THROW(P{v}, InvalidArgument);
  v << 1.0, INFINITY;
  EXPECT_THROW(P{v}, InvalidArgument);
}

TEST(Space, NormExamples) {
  const auto e = Sp::euclidean(2);
  EXPECT_DOUBLE_EQ(norm(e, P{3.0, 4.0}), 5.0);
  const auto l = Sp::lp(2, 1.5, std::sqrt(0.5));
  EXPECT_NEAR(norm(l, P{1.0, 1.0}), std::pow(2.0, 2.0 / 3.0), 1e-15);
  EXPECT_NEAR(dual_norm(l, D{1.0, 1.0}), std::pow(2.0, 1.0 / 3.0), 1e-15);
  EXPECT_THROW(norm(e, P{1.0, 2.0, 3.0}), DimensionMismatch);
}

TEST(Space, DualityMapExamples) {
  const auto e = Sp::euclidean(2);
  EXPECT_EQ(duality_map(e, P{1.0, -2.0}), (D{1.0, -2.0}));
  EXPECT_EQ(duality_map_inverse(Sp::euclidean(1), D{5.0}), P{5.0});

  // l_1.5: ||(1,1)|| = 2^(2/3), J = 2^(2/3 * 1/2) (1, 1) = 2^(1/3) (1, 1).
  const auto l = Sp::lp(2, 1.5, std::sqrt(0.5));
  const D j = duality_map(l, P{1.0, 1.0});
  EXPECT_NEAR(j[0], std::cbrt(2.0), 1e-15);
  EXPECT_NEAR(j[1], std::cbrt(2.0), 1e-15);
  EXPECT_EQ(duality_map(l, P::zero(2)), D::zero(2));
  EXPECT_EQ(duality_map_inverse(l, D::zero(2)), P::zero(2));

  // Single nonzero coordinate: J x = x.
  const D single = duality_map(l, P{0.0, -3.0});
  EXPECT_NEAR(single[1], -3.0, 1e-14);
  EXPECT_EQ(single[0], 0.0);
}

TEST(Space, LyapunovExamples) {
  const auto e = Sp::euclidean(2);
  EXPECT_DOUBLE_EQ(lyapunov(e, P{1.0, 0.0}, P{0.0, 1.0}), 2.0);
  EXPECT_DOUBLE_EQ(v_functional(e, P{1.0, 0.0}, D{0.0, 0.0}), 1.0);
  EXPECT_DOUBLE_EQ(v_functional(e, P{1.0, 2.0}, D{3.0, 4.0}), 8.0);
  const auto l = Sp::lp(3, 1.5, std::sqrt(0.5));
  const P x{0.3, -1.2, 2.0};
  EXPECT_EQ(lyapunov(l, x, x), 0.0);
}

TEST(Space, LyapunovMatchesLongDoubleOracle) {
  UniformSampler<double> rng(7);
  for (double p : {1.2, 1.5, 1.9}) {
    const auto l = Sp::lp(4, p, std::sqrt(p - 1));
    for (int s = 0; s < 200; ++s) {
      const P x = random_point(rng, 4), y = random_point(rng, 4);
      const long double want = phi_ld(x.coords(), y.coords(), p);
      EXPECT_NEAR(lyapunov(l, x, y), static_cast<double>(want), 1e-12 * (1 + std::fabs(static_cast<double>(want))));
      const D jy = duality_map(l, y);
      const auto jy_ld = duality_ld(y.coords(), p);
      for (Index i = 0; i < 4; ++i) EXPECT_NEAR(jy[i], static_cast<double>(jy_ld[i]), 1e-12 * (1 + std::fabs(jy[i])));
    }
  }
}

TEST(Space, NormIsScaleSafe) {
  const auto l = Sp::lp(2, 1.5, std::sqrt(0.5));
  EXPECT_NEAR(norm(l, P{1e200, 1e200}) / 1e200, std::pow(2.0, 2.0 / 3.0), 1e-14);
  EXPECT_NEAR(norm(l, P{1e-200, 1e-200}) / 1e-200, std::pow(2.0, 2.0 / 3.0), 1e-14);
}

// Shared property battery over the spaces used throughout the project.
class GeometryProperties : public ::testing::TestWithParam<Sp> {};

TEST_P(GeometryProperties, DualityIdentities) {
  const Sp space = GetParam();
  UniformSampler<double> rng(42);
  for (int s = 0; s < 200; ++s) {
    const P x = random_point(rng, space.dim());
    const D jx = duality_map(space, x);
    const double n = norm(space, x);
    EXPECT_NEAR(pairing(space, jx, x), n * n, 1e-10 * (1 + n * n));
    EXPECT_NEAR(dual_norm(space, jx), n, 1e-10 * (1 + n));
    const P back = duality_map_inverse(space, jx);
    EXPECT_LE((back - x).coords().norm(), 1e-10 * (1 + n));
  }
}

TEST_P(GeometryProperties, LyapunovSandwichAndThreePoint) {
  const Sp space = GetParam();
  UniformSampler<double> rng(43);
  for (int s = 0; s < 200; ++s) {
    const P x = random_point(rng, space.dim()), y = random_point(rng, space.dim()), z = random_point(rng, space.dim());
    const double nx = norm(space, x), ny = norm(space, y);
    const double phi = lyapunov(space, x, y);
    const double slack = 1e-8 * (1 + (nx + ny) * (nx + ny));
    EXPECT_GE(phi, (nx - ny) * (nx - ny) - slack);
    EXPECT_LE(phi, (nx + ny) * (nx + ny) + slack);
    const double rhs = lyapunov(space, x, z) + lyapunov(space, z, y) +
                       2 * pairing(space, duality_map(space, z) - duality_map(space, y), x - z);
    EXPECT_NEAR(phi, rhs, slack);
  }
}

TEST_P(GeometryProperties, VFunctionalInequality) {
  const Sp space = GetParam();
  UniformSampler<double> rng(44);
  for (int s = 0; s < 200; ++s) {
    const P x = random_point(rng, space.dim());
    const D xs = duality_map(space, random_point(rng, space.dim()));
    const D ys = duality_map(space, random_point(rng, space.dim()));
    EXPECT_NEAR(v_functional(space, x, xs), lyapunov(space, x, duality_map_inverse(space, xs)), 1e-9);
    const double lhs = v_functional(space, x, xs) + 2 * pairing(space, ys, duality_map_inverse(space, xs) - x);
    EXPECT_LE(lhs, v_functional(space, x, xs + ys) + 1e-8 * (1 + std::fabs(lhs)));
  }
}

TEST_P(GeometryProperties, InverseDualityIsLipschitz) {
  const Sp space = GetParam();
  UniformSampler<double> rng(45);
  const double k = 2 / (space.c() * space.c());
  for (int s = 0; s < 200; ++s) {
    const P x = random_point(rng, space.dim()), y = random_point(rng, space.dim());
    const double lhs = norm(space, x - y);
    EXPECT_LE(lhs, k * dual_norm(space, duality_map(space, x) - duality_map(space, y)) + 1e-8);
  }
}

INSTANTIATE_TEST_SUITE_P(Spaces, GeometryProperties,
                         ::testing::Values(Sp::euclidean(1), Sp::euclidean(2), Sp::euclidean(4),
                                           Sp::lp(4, 1.5, std::sqrt(0.5)), Sp::lp(3, 1.2, std::sqrt(0.2)),
                                           Sp::lp(2, 2.0, 1.0)));

TEST(Space, HaltonIsDeterministicAndInUnitCube) {
  HaltonSequence<double> a(3), b(3);
  for (int i = 0; i < 50; ++i) {
    const auto u = a.next();
    EXPECT_EQ(u, b.next());
    EXPECT_TRUE((u.array() >= 0).all() && (u.array() < 1).all());
  }
  HaltonSequence<double> h(2);
  const auto first = h.next();
  EXPECT_DOUBLE_EQ(first[0], 0.5);
  EXPECT_DOUBLE_EQ(first[1], 1.0 / 3.0);
}

}  // namespace
}  // namespace exgrad
