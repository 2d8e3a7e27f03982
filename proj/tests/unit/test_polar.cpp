#include <gtest/gtest.h>

#include <cmath>

#include "orbitlift/catalog.hpp"
#include "orbitlift/error.hpp"
#include "orbitlift/polar.hpp"

using namespace orbitlift;

namespace {

Eigen::MatrixXd first_axis(int n) { return Eigen::MatrixXd::Identity(n, 1); }

}  // namespace

TEST(Weyl, RotationFamilies) {
  for (int n : {2, 3, 4}) {
    const FiniteGroup w = weyl_group(so_sampler(n), first_axis(n));
    EXPECT_EQ(w.order(), 2u) << n;
  }
  Eigen::MatrixXd line(3, 1);
  line << 1, 2, 2;
  line /= 3.0;
  EXPECT_EQ(weyl_group(so_sampler(3), line).order(), 2u);
}

TEST(Weyl, FiniteWholeSpace) {
  const FiniteGroup b2 = enumerate_group(catalog("Bn", {2}));
  const FiniteGroup w = weyl_group(finite_sampler(b2), Eigen::MatrixXd::Identity(2, 2));
  EXPECT_EQ(w.order(), b2.order());
}

TEST(Weyl, NotASection) {
  // a plane is not a section for SO(3) on R^3
  try {
    make_polar_spec(so_sampler(3), Eigen::MatrixXd::Identity(3, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.kind() == ErrorKind::not_a_section || e.kind() == ErrorKind::not_invariant ||
                e.kind() == ErrorKind::not_polar);
  }
}

TEST(Sampler, Parse) {
  EXPECT_EQ(parse_sampler("sampler:so2").dimension, 2);
  EXPECT_EQ(parse_sampler("sampler:so5").algebra.size(), 10u);
  EXPECT_THROW(parse_sampler("finite"), Error);
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd g = so_sampler(3).sample(rng);
  EXPECT_LE((g.transpose() * g - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(g.determinant(), 1.0, 1e-12);
}

TEST(Restrict, NormSquareOnAxis) {
  for (int n : {2, 3}) {
    const PolarSpec spec = make_polar_spec(so_sampler(n), first_axis(n));
    const auto restricted = restrict_orbit_map(spec.system, spec.section, spec.weyl);
    ASSERT_EQ(restricted.size(), 1u);
    EXPECT_EQ(restricted.generators[0], Poly<double>::monomial({2}, 1.0));
  }
  const FiniteGroup t = enumerate_group(catalog("T"));
  const PolarSpec whole = make_polar_spec(finite_sampler(t), Eigen::MatrixXd::Identity(3, 3), 6);
  const auto same = restrict_orbit_map(whole.system, whole.section, whole.weyl);
  EXPECT_EQ(same.degrees, (std::vector<int>{2, 3, 4, 6}));
  const Eigen::Vector3d x(0.2, -0.4, 0.9);
  EXPECT_LE((orbit_map_eval(same, x) - orbit_map_eval(whole.system, x)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Validate, Certificates) {
  for (int n : {2, 3}) {
    const PolarSpec spec = make_polar_spec(so_sampler(n), first_axis(n));
    const PolarCertificate cert = validate_polar(spec);
    EXPECT_TRUE(cert.passed);
    EXPECT_LE(cert.max_distance, 1e-6);
    EXPECT_LE(cert.max_tangent, 1e-6);
    EXPECT_TRUE(restriction_separates(spec));
  }
}

TEST(PolarLift, SquareRootOfNorm) {
  const PolarSpec spec = make_polar_spec(so_sampler(2), first_axis(2));
  const Curve c = Curve::polynomial({{{2, 1.0}}}, -1.0, 1.0);
  const auto grid = uniform_grid(-1.0, 1.0, 101);
  const PolarLiftResult r = polar_lift(c, spec, grid);
  EXPECT_TRUE(r.orthogonal);
  const double sign = r.lift.points.back()(0) > 0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(r.lift.points[i](0), sign * grid[i], 1e-8);
    EXPECT_NEAR(r.lift.points[i](1), 0.0, 1e-12);
  }
}

TEST(PolarLift, ConstantAndPositive) {
  const PolarSpec spec = make_polar_spec(so_sampler(3), first_axis(3));
  const auto grid = uniform_grid(-1.0, 1.0, 51);
  const PolarLiftResult constant = polar_lift(Curve::polynomial({{{0, 4.0}}}, -1.0, 1.0), spec, grid);
  for (const auto& p : constant.lift.points) EXPECT_LE((p - constant.lift.points.front()).norm(), 1e-12);
  for (const auto& d : constant.lift.derivatives) EXPECT_LE(d.norm(), 1e-10);

  // (1 + t^2)^2 = 1 + 2 t^2 + t^4
  const PolarLiftResult r = polar_lift(Curve::polynomial({{{0, 1.0}, {2, 2.0}, {4, 1.0}}}, -1.0, 1.0), spec, grid);
  EXPECT_TRUE(r.orthogonal);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(std::abs(r.lift.points[i](0)), 1.0 + grid[i] * grid[i], 1e-9);
    EXPECT_LE(r.lift.points[i].tail(2).norm(), 1e-12);
  }
}

TEST(PolarLift, FiniteWholeSpaceMatchesLift) {
  const FiniteGroup g = enumerate_group(catalog("I2n", {5}));
  const PolarSpec spec = make_polar_spec(finite_sampler(g), Eigen::MatrixXd::Identity(2, 2), 5);
  const OrbitMap map(spec.system);
  const Curve path = Curve::polynomial({{{0, 0.3}, {1, 1.0}}, {{0, -0.2}, {2, 0.7}}}, -1.0, 1.0);
  const Curve c = forward_curve(map, path);
  const auto grid = uniform_grid(-1.0, 1.0, 101);
  const PolarLiftResult polar = polar_lift(c, spec, grid);
  const LiftResult direct = lift_curve(g, map, c, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_LE((map.eval(polar.lift.points[i]) - map.eval(direct.points[i])).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(polar.lift.derivatives[i].norm(), direct.derivatives[i].norm(), 1e-9);
  }
}

TEST(Counterexamples, RotationGroup) {
  const CounterexampleReport r = so2_counterexamples();
  EXPECT_TRUE(r.residual_ok);
  EXPECT_LE(r.max_residual, 1e-10);
  EXPECT_LE((r.derivative_straight - Eigen::Vector2d(1, 0)).norm(), 1e-9);
  EXPECT_LE((r.derivative_turning - Eigen::Vector2d(1, 2 * M_PI)).norm(), 1e-9);
  EXPECT_TRUE(r.pair_ok);
  ASSERT_FALSE(r.oscillation.empty());
  for (double o : r.oscillation) EXPECT_GE(o, 1.0);
  EXPECT_TRUE(r.passed());
}
