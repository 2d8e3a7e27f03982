#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <numbers>

#include "orbitlift/catalog.hpp"
#include "orbitlift/error.hpp"
#include "orbitlift/lifting.hpp"

using namespace orbitlift;

namespace {

constexpr double kPi = std::numbers::pi;

struct Instance {
  FiniteGroup group;
  OrbitMap map;
};

Instance setup(const std::string& family, int n, int cap) {
  Instance s;
  s.group = enumerate_group(catalog(family, {n}));
  InvariantOptions o;
  o.cap = cap;
  s.map = OrbitMap(generate_invariants(s.group, o).numeric);
  return s;
}

Curve path_of(int dim, double a, double b, std::function<Eigen::VectorXd(double)> f) {
  return Curve::from_function(dim, a, b, std::move(f));
}

// distance from x to the orbit of y
double orbit_distance(const FiniteGroup& g, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  double best = 1e300;
  for (const auto& m : g.elements()) best = std::min(best, (m * y - x).norm());
  return best;
}

// Lift agrees with g * path for one fixed g over the whole grid.
double fixed_element_distance(const FiniteGroup& g, const LiftResult& r, const Curve& path) {
  double best = 1e300;
  for (const auto& m : g.elements()) {
    double worst = 0.0;
    for (std::size_t i = 0; i < r.grid.size(); ++i) worst = std::max(worst, (m * path.value(r.grid[i]) - r.points[i]).norm());
    best = std::min(best, worst);
  }
  return best;
}

std::size_t element_of(const FiniteGroup& g, const Eigen::MatrixXd& m) { return *g.index_of(m); }

Eigen::Matrix2d swap2() {
  Eigen::Matrix2d s;
  s << 0, 1, 1, 0;
  return s;
}

}  // namespace

TEST(LiftRegular, S2Shift) {
  const Instance s = setup("Sn", 2, 2);
  const Curve path = Curve::polynomial({{{0, 1.0}, {1, 1.0}}, {{0, -1.0}}}, -0.3, 0.3);
  const Curve c = forward_curve(s.map, path);
  const auto times = uniform_grid(0.0, 0.3, 16);
  const LocalLift l = lift_regular(s.group, s.map, c, times, Eigen::Vector2d(1, -1));
  ASSERT_EQ(l.points.size(), times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    EXPECT_LE((l.points[i] - Eigen::Vector2d(1 + times[i], -1)).norm(), 1e-10);
    EXPECT_LE((l.derivatives[i] - Eigen::Vector2d(1, 0)).norm(), 1e-8);
  }
  EXPECT_THROW(lift_regular(s.group, s.map, c, times, Eigen::Vector2d(3, 1)), Error);
}

TEST(LiftRegular, TrivialGroupIsIdentity) {
  const FiniteGroup g = enumerate_group(catalog("trivial", {0, 2}));
  InvariantOptions o;
  o.cap = 1;
  const OrbitMap map(generate_invariants(g, o).numeric);
  const Curve c = Curve::polynomial({{{0, 1.0}, {2, 1.0}}, {{1, -2.0}}}, 0.0, 1.0);
  const auto times = uniform_grid(0.0, 1.0, 11);
  const Eigen::VectorXd seed = find_preimage(g, map, c.value(0.0));
  const LocalLift l = lift_regular(g, map, c, times, seed);
  for (std::size_t i = 0; i < times.size(); ++i) {
    // the generators are the coordinates up to an orthogonal change of basis
    EXPECT_LE((map.eval(l.points[i]) - c.value(times[i])).norm(), 1e-12);
    EXPECT_NEAR(l.points[i].norm(), c.value(times[i]).norm(), 1e-12);
  }
}

TEST(LiftRegular, C2ArcAvoidingZero) {
  const Instance s = setup("C2n", 3, 3);
  const Curve path = path_of(2, 0.0, 1.0, [](double t) { return Eigen::Vector2d(std::cos(t), std::sin(t)); });
  const Curve c = forward_curve(s.map, path);
  const auto times = uniform_grid(0.0, 1.0, 21);
  const Eigen::VectorXd seed = find_preimage(s.group, s.map, c.value(0.0));
  const LocalLift l = lift_regular(s.group, s.map, c, times, seed);
  for (std::size_t i = 0; i < times.size(); ++i)
    EXPECT_LE((s.map.eval(l.points[i]) - c.value(times[i])).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SliceReduce, StabilizerOrders) {
  const Instance i5 = setup("I2n", 5, 5);
  const Curve line = Curve::polynomial({{{0, 1.0}}, {{1, 1.0}}}, -0.5, 0.5);
  const Eigen::VectorXd v = Eigen::Vector2d(1, 0);
  const SliceProblem p = slice_reduce(i5.group, i5.map, forward_curve(i5.map, line), 0.0, v, 0.1);
  EXPECT_EQ(p.stabilizer.order(), 2u);
  EXPECT_LE(p.curve.value(0.0).cwiseAbs().maxCoeff(), 1e-8);

  const Instance t = setup("T", 0, 6);
  const Curve axis = Curve::polynomial({{{0, 1.0}}, {{0, 1.0}, {1, 0.5}}, {{0, 1.0}}}, -0.5, 0.5);
  const SliceProblem q = slice_reduce(t.group, t.map, forward_curve(t.map, axis), 0.0, Eigen::Vector3d(1, 1, 1), 0.1);
  EXPECT_EQ(q.stabilizer.order(), 3u);
}

TEST(LiftThroughZero, ScalingLine) {
  const Instance s = setup("W", 0, 9);
  const Eigen::Vector3d v(0.3, -0.5, 0.8);
  const Curve path = path_of(3, -0.5, 0.5, [v](double t) { return Eigen::VectorXd(t * v); });
  const Curve c = forward_curve(s.map, path);
  const auto times = uniform_grid(-0.05, 0.05, 11);
  const LocalLift l = lift_through_zero(s.group, s.map, c, 0.0, times);
  const std::size_t mid = 5;
  EXPECT_LE(l.points[mid].norm(), 1e-9);
  EXPECT_LE(orbit_distance(s.group, l.derivatives[mid], v), 1e-6);
  for (std::size_t i = 0; i < times.size(); ++i) EXPECT_LE(orbit_distance(s.group, l.points[i], times[i] * v), 1e-8);
}

TEST(LiftThroughZero, S2Roots) {
  const Instance s = setup("Sn", 2, 2);
  const Curve path = Curve::polynomial({{{1, 1.0}}, {{1, -1.0}}}, -1.0, 1.0);
  const Curve c = forward_curve(s.map, path);
  const auto times = uniform_grid(-0.1, 0.1, 21);
  const LocalLift l = lift_through_zero(s.group, s.map, c, 0.0, times);
  const Eigen::Vector2d d = l.derivatives[10];
  EXPECT_TRUE((d - Eigen::Vector2d(1, -1)).norm() < 1e-6 || (d - Eigen::Vector2d(-1, 1)).norm() < 1e-6);
  for (std::size_t i = 0; i < times.size(); ++i)
    EXPECT_LE((l.points[i] - times[i] * d).norm(), 1e-8);
}

TEST(MatchDerivative, Examples) {
  const Instance s = setup("Sn", 2, 2);
  const Eigen::Vector2d a(0.5, -0.5), da(1, -1);
  const DerivativeMatch same = match_derivative(s.group, a, da, a, da);
  EXPECT_EQ(same.h, 0u);
  EXPECT_EQ(same.g, 0u);
  const DerivativeMatch sw = match_derivative(s.group, a, da, -a, -da);
  EXPECT_EQ(sw.g, element_of(s.group, swap2()));
  EXPECT_EQ(sw.combined, sw.g);
}

TEST(MatchDerivative, FiniteSurrogateOfRotationExample) {
  // a straight and a turning lift of the same norm curve meet at (2 pi, 0)
  // with derivatives (1, 0) and (1, 2 pi); a finite rotation group cannot
  // relate them
  const Instance s = setup("C2n", 12, 12);
  const Eigen::Vector2d a(2 * kPi, 0), da(1, 0), db(1, 2 * kPi);
  try {
    match_derivative(s.group, a, da, a, db);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::no_match);
  }
}

TEST(Glue, OppositeSheets) {
  const Instance s = setup("Sn", 2, 2);
  auto make = [](double a, double b, bool swapped) {
    LocalLift l;
    l.kind = "regular";
    for (double t : uniform_grid(a, b, 11)) {
      Eigen::Vector2d x(1 + t, -1), dx(1, 0);
      if (swapped) {
        x = swap2() * x;
        dx = swap2() * dx;
      }
      l.times.push_back(t);
      l.points.push_back(x);
      l.derivatives.push_back(dx);
    }
    return l;
  };
  const LiftResult single = glue_lifts(s.group, s.map, {make(0.0, 0.5, false)});
  EXPECT_TRUE(single.glue_log.empty());

  const LiftResult r = glue_lifts(s.group, s.map, {make(0.0, 0.5, false), make(0.4, 1.0, true)});
  std::size_t swaps = 0;
  for (const auto& rec : r.glue_log) swaps += rec.element_index == element_of(s.group, swap2());
  EXPECT_EQ(swaps, 1u);
  for (std::size_t i = 0; i < r.grid.size(); ++i)
    EXPECT_LE((r.points[i] - Eigen::Vector2d(1 + r.grid[i], -1)).norm(), 1e-12);
  for (std::size_t i = 1; i < r.grid.size(); ++i) EXPECT_LE((r.derivatives[i] - r.derivatives[i - 1]).norm(), 1e-12);
}

TEST(LiftCurve, ScalingLineAnyGroup) {
  for (const auto& [family, n, cap] : std::vector<std::tuple<std::string, int, int>>{{"T", 0, 6}, {"Bn", 3, 6}, {"I2n", 7, 7}}) {
    const Instance s = setup(family, n, cap);
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(s.group.dimension(), 0.4, -0.9);
    const Curve path = path_of(s.group.dimension(), -1.0, 1.0, [v](double t) { return Eigen::VectorXd((t - 0.013) * v); });
    const auto grid = uniform_grid(-1.0, 1.0, 101);
    const LiftResult r = lift_curve(s.group, s.map, forward_curve(s.map, path), grid);
    EXPECT_LE(r.diagnostics.max_residual, 1e-8) << family;
    EXPECT_LE(fixed_element_distance(s.group, r, path), 1e-6) << family;
  }
}

TEST(LiftCurve, SineTripleS3) {
  const Instance s = setup("Sn", 3, 3);
  const Curve path = path_of(3, -1.0, 1.0, [](double t) {
    return Eigen::Vector3d(std::sin(t), std::sin(t + 2 * kPi / 3), std::sin(t + 4 * kPi / 3));
  });
  const auto grid = uniform_grid(-1.0, 1.0, 201);
  const LiftResult r = lift_curve(s.group, s.map, forward_curve(s.map, path), grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Eigen::VectorXd a = r.points[i], b = path.value(grid[i]);
    std::sort(a.data(), a.data() + 3);
    std::sort(b.data(), b.data() + 3);
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-8);
  }
  for (const auto& bound : r.diagnostics.bounds) EXPECT_LE(bound.value, std::sqrt(1.5) + 1e-3);
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) EXPECT_LE(r.derivatives[i].cwiseAbs().maxCoeff(), 1.0 + 1e-3);
}

TEST(LiftCurve, WFaceAxisCrossing) {
  const Instance s = setup("W", 0, 9);
  // crosses the face axis (0, 0, z) between grid nodes
  const Curve path = path_of(3, -1.0, 1.0, [](double t) {
    const double u = t - 0.0037;
    return Eigen::Vector3d(u, 0.4 * u + u * u, 1.0 + 0.2 * t);
  });
  const auto grid = uniform_grid(-1.0, 1.0, 201);
  const LiftResult r = lift_curve(s.group, s.map, forward_curve(s.map, path), grid);
  EXPECT_LE(r.diagnostics.max_residual, 1e-8);
  EXPECT_FALSE(r.glue_log.empty());
  for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_LE((r.points[i] - r.points[i - 1]).norm(), 0.05);
  double dn = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    dn = std::max(dn, std::abs(r.derivatives[i].norm() - path.derivative(grid[i]).norm()));
  EXPECT_LE(dn, 1e-6);
}

TEST(LiftCurve, ClosedFormsS2AndC2) {
  const auto grid = uniform_grid(-1.0, 1.0, 101);
  {
    const Instance s = setup("Sn", 2, 2);
    // roots of y^2 - (t + 0.31) y + ... with closed form (t + 0.3 ± sqrt(...)) via the path itself
    const Curve path = path_of(2, -1.0, 1.0, [](double t) { return Eigen::Vector2d(t * t + 0.1, 0.5 * t - 0.2); });
    const LiftResult r = lift_curve(s.group, s.map, forward_curve(s.map, path), grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Eigen::VectorXd c = s.map.eval(path.value(grid[i]));
      // closed form from e1 = x1 + x2 and |x|^2
      const double e1 = c(0), e2 = (e1 * e1 - c(1)) / 2.0;
      const double disc = std::sqrt(std::max(0.0, e1 * e1 - 4 * e2));
      const Eigen::Vector2d root((e1 + disc) / 2, (e1 - disc) / 2);
      EXPECT_LE(orbit_distance(s.group, r.points[i], root), 1e-9);
    }
  }
  {
    const Instance s = setup("C2n", 2, 2);
    const Curve path = path_of(2, -1.0, 1.0, [](double t) { return Eigen::Vector2d(std::cos(t), 0.5 + std::sin(t)); });
    const LiftResult r = lift_curve(s.group, s.map, forward_curve(s.map, path), grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      // half-angle form: x = sqrt(r) (cos(phi/2), sin(phi/2)) from (x + iy)^2 = r e^{i phi}
      const Eigen::Vector2d p = path.value(grid[i]);
      const std::complex<double> z(p(0), p(1));
      const std::complex<double> w = std::sqrt(z * z);
      EXPECT_LE(orbit_distance(s.group, r.points[i], Eigen::Vector2d(w.real(), w.imag())), 1e-9);
    }
  }
}

TEST(LiftCurve, ScalingEquivariance) {
  const Instance s = setup("T", 0, 6);
  const Curve path = path_of(3, -1.0, 1.0, [](double t) { return Eigen::Vector3d(t - 0.011, 0.5 + t * t, 0.3 - t); });
  const Curve c = forward_curve(s.map, path);
  const auto grid = uniform_grid(-1.0, 1.0, 101);
  const LiftResult base = lift_curve(s.group, s.map, c, grid);
  for (double scale : {3.0, 1.0 / 3.0}) {
    const OrbitMap map = s.map;
    const Curve cs(c.dim(), c.start(), c.end(), [c, map, scale](double t, Eigen::VectorXd* v, Eigen::VectorXd* d) {
      Eigen::VectorXd cv, cd;
      c.evaluate(t, &cv, &cd);
      for (int i = 0; i < cv.size(); ++i) {
        const double f = std::pow(scale, map.degrees()[i]);
        cv(i) *= f;
        cd(i) *= f;
      }
      if (v) *v = cv;
      if (d) *d = cd;
    });
    const LiftResult r = lift_curve(s.group, s.map, cs, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Eigen::VectorXd a = s.map.eval(r.points[i] / scale), b = s.map.eval(base.points[i]);
      EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-8 * std::max(1.0, b.cwiseAbs().maxCoeff()));
      EXPECT_NEAR(r.derivatives[i].norm(), scale * base.derivatives[i].norm(), 1e-8 * std::max(1.0, scale));
    }
  }
}

TEST(LiftCurve, DerivativeNormIndependentOfSeed) {
  const Instance s = setup("Bn", 3, 6);
  const Curve path = path_of(3, -1.0, 1.0, [](double t) { return Eigen::Vector3d(t - 0.017, 0.7 - t, 0.2 + 0.5 * t * t); });
  const Curve c = forward_curve(s.map, path);
  const auto grid = uniform_grid(-1.0, 1.0, 101);
  LiftOptions a, b;
  a.seed = 1;
  b.seed = 99;
  const LiftResult ra = lift_curve(s.group, s.map, c, grid, a);
  const LiftResult rb = lift_curve(s.group, s.map, c, grid, b);
  for (std::size_t i = 0; i < grid.size(); ++i)
    EXPECT_NEAR(ra.derivatives[i].norm(), rb.derivatives[i].norm(), 1e-6);
}

TEST(LiftCurve, FlatZoneIsZero) {
  const Instance s = setup("I2n", 5, 5);
  const Eigen::Vector2d v(0.6, 0.8);
  const Curve path = path_of(2, -1.0, 1.0, [v](double t) {
    const double f = t > 0.2 ? std::pow(t - 0.2, 4) : (t < -0.2 ? std::pow(t + 0.2, 4) : 0.0);
    return Eigen::VectorXd(f * v);
  });
  const auto grid = uniform_grid(-1.0, 1.0, 101);
  const LiftResult r = lift_curve(s.group, s.map, forward_curve(s.map, path), grid);
  EXPECT_FALSE(r.zero_set.flat_zones.empty());
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (std::abs(grid[i]) < 0.15) EXPECT_EQ(r.points[i].norm(), 0.0);
  EXPECT_LE(r.diagnostics.max_residual, 1e-8);
}

TEST(LiftCurve, GlueAcrossIsolatedZero) {
  const Instance s = setup("I2n", 5, 5);
  const Eigen::Vector2d v(0.6, 0.8);
  auto gamma = [v](double t) {
    const double u = t - 0.0041;
    return Eigen::VectorXd((u * u * u + u) * v);
  };
  const Curve c = forward_curve(s.map, path_of(2, -1.0, 1.0, gamma));
  LiftOptions o;
  o.k = 5;
  const LiftResult r = lift_curve(s.group, s.map, c, uniform_grid(-1.0, 1.0, 101), o);
  EXPECT_EQ(r.zero_set.zeros.size(), 1u);
  EXPECT_LE(fixed_element_distance(s.group, r, path_of(2, -1.0, 1.0, gamma)), 1e-7);
  ASSERT_TRUE(r.diagnostics.second_differences_emitted);
  EXPECT_TRUE(r.diagnostics.second_differences_bounded);
}

TEST(Reduction, SymmetricGroupFunctionalsAreCoordinates) {
  const Instance s = setup("Sn", 3, 3);
  const ReductionPlan plan = build_reduction(s.group, irreducible_decomposition(s.group), s.map.system());
  int total = 0;
  for (const auto& comp : plan.components) {
    total += comp.k;
    EXPECT_EQ(static_cast<int>(comp.cosets.size()), comp.k);
    EXPECT_EQ(comp.functionals.rows(), comp.k);
    for (int i = 0; i < comp.k; ++i)
      for (int j = i + 1; j < comp.k; ++j) EXPECT_GT((comp.functionals.row(i) - comp.functionals.row(j)).norm(), 1e-6);
  }
  EXPECT_EQ(plan.k, 3);
  (void)total;
}

TEST(Reduction, RotationFunctionals) {
  const Instance s = setup("C2n", 5, 5);
  const ReductionPlan plan = build_reduction(s.group, irreducible_decomposition(s.group), s.map.system());
  ASSERT_EQ(plan.components.size(), 1u);
  const auto& comp = plan.components[0];
  EXPECT_EQ(comp.k, 5);
  // rows are <v | g x> for the five rotations: unit vectors at angles 2 pi j / 5 from the first row
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(comp.functionals.row(i).norm(), comp.base_point.norm(), 1e-12);
  std::vector<double> angles;
  for (int i = 0; i < 5; ++i) angles.push_back(std::atan2(comp.functionals(i, 1), comp.functionals(i, 0)));
  std::sort(angles.begin(), angles.end());
  for (int i = 1; i < 5; ++i) EXPECT_NEAR(angles[i] - angles[i - 1], 2 * kPi / 5, 1e-9);
}

TEST(Reduction, CoefficientsMatchExpressions) {
  const Instance s = setup("T", 0, 6);
  const ReductionPlan plan = build_reduction(s.group, irreducible_decomposition(s.group), s.map.system());
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  for (const auto& comp : plan.components) {
    const auto a = reduction_coefficients(comp, 3);
    ASSERT_EQ(a.size(), comp.expressions.size());
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::Vector3d x(normal(rng), normal(rng), normal(rng));
      const Eigen::VectorXd c = s.map.eval(x);
      for (std::size_t j = 0; j < a.size(); ++j)
        EXPECT_NEAR(a[j].evaluate(x), comp.expressions[j].evaluate(c), 1e-10 * std::max(1.0, std::abs(a[j].evaluate(x))));
    }
  }
}

TEST(Reduction, CheckOnLifts) {
  const Instance s = setup("T", 0, 6);
  const ReductionPlan plan = build_reduction(s.group, irreducible_decomposition(s.group), s.map.system());
  const Curve path = path_of(3, -1.0, 1.0, [](double t) { return Eigen::Vector3d(t - 0.013, 0.3 + t * t, 0.6 * t); });
  const Curve c = forward_curve(s.map, path);
  const auto grid = uniform_grid(-1.0, 1.0, 101);
  const LiftResult r = lift_curve(s.group, s.map, c, grid);
  const ReductionReport report = reduction_check(plan, s.map, c, r);
  EXPECT_TRUE(report.passed);
  EXPECT_LE(report.max_mismatch, 1e-8);

  const Curve constant = path_of(3, -1.0, 1.0, [](double) { return Eigen::Vector3d(0.2, 0.5, -0.4); });
  const Curve cc = forward_curve(s.map, constant);
  const ReductionReport flat = reduction_check(plan, s.map, cc, lift_curve(s.group, s.map, cc, grid));
  EXPECT_TRUE(flat.passed);
  for (const auto& comp : flat.components) EXPECT_LE(comp.track_bound, 1e-8);
}

TEST(Grid, Refinement) {
  const auto g = uniform_grid(0.0, 1.0, 5);
  EXPECT_EQ(refine_grid(g, 0).size(), 5u);
  EXPECT_EQ(refine_grid(g, 1).size(), 9u);
  EXPECT_EQ(refine_grid(g, 3).size(), 33u);
  EXPECT_DOUBLE_EQ(refine_grid(g, 2)[1], 0.0625);
}
