#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "orbitlift/catalog.hpp"
#include "orbitlift/hyperbolic.hpp"
#include "orbitlift/invariants.hpp"
#include "orbitlift/lifting.hpp"

using namespace orbitlift;

namespace {

struct Fixture {
  FiniteGroup group;
  InvariantSystem system;
  OrbitMap map;
};

Fixture make(const std::string& family, int n, int cap) {
  FiniteGroup g = enumerate_group(catalog(family, {n}));
  InvariantOptions o;
  o.cap = cap;
  InvariantSystem s = generate_invariants(g, o);
  OrbitMap m(s.numeric);
  return {std::move(g), std::move(s), std::move(m)};
}

// a cubic path through the origin at t = -0.3
Curve path_for(int m) {
  std::vector<Curve::PolyComponent> comps(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double a = 0.4 + 0.3 * i, e = 0.2 - 0.15 * i;
    comps[static_cast<std::size_t>(i)] = {{0, 0.3 * a}, {1, a + 0.3 * e}, {2, e}};
  }
  return Curve::polynomial(comps, -1.0, 1.0);
}

void BM_Enumerate(benchmark::State& state, const char* family) {
  const GroupSpec spec = catalog(family);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_group(spec).order());
}
BENCHMARK_CAPTURE(BM_Enumerate, W, "W");
BENCHMARK_CAPTURE(BM_Enumerate, H, "H");
BENCHMARK_CAPTURE(BM_Enumerate, H3, "H3");

void BM_Invariants(benchmark::State& state, const char* family, int cap) {
  const FiniteGroup g = enumerate_group(catalog(family));
  InvariantOptions o;
  o.cap = cap;
  for (auto _ : state) benchmark::DoNotOptimize(generate_invariants(g, o).d());
}
BENCHMARK_CAPTURE(BM_Invariants, T, "T", 6)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Invariants, W, "W", 9)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Invariants, H3, "H3", 10)->Unit(benchmark::kMillisecond);

void BM_OrbitMapJacobian(benchmark::State& state) {
  const Fixture f = make("H", 0, 15);
  const Eigen::Vector3d x(0.3, -0.7, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(f.map.jacobian(x).sum());
}
BENCHMARK(BM_OrbitMapJacobian);

void BM_TrackRoots(benchmark::State& state) {
  constexpr double pi = std::numbers::pi;
  const Curve c = Curve::from_function(3, -1.0, 1.0, [](double t) {
    return coefficients_from_roots({std::sin(t), std::sin(t + 2 * pi / 3), std::sin(t + 4 * pi / 3)});
  });
  const auto grid = uniform_grid(-1.0, 1.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(track_roots(c, grid).times.size());
}
BENCHMARK(BM_TrackRoots)->Arg(101)->Arg(401)->Unit(benchmark::kMillisecond);

void BM_Lift(benchmark::State& state, const char* family, int n, int cap) {
  const Fixture f = make(family, n, cap);
  const Curve c = forward_curve(f.map, path_for(f.group.dimension()));
  const auto grid = uniform_grid(-1.0, 1.0, 201);
  LiftOptions lo;
  lo.diagnostics = false;
  for (auto _ : state) benchmark::DoNotOptimize(lift_curve(f.group, f.map, c, grid, lo).points.size());
}
BENCHMARK_CAPTURE(BM_Lift, S3, "Sn", 3, 3)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Lift, W, "W", 0, 9)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Lift, H, "H", 0, 15)->Unit(benchmark::kMillisecond);

void BM_ReductionCheck(benchmark::State& state) {
  const Fixture f = make("T", 0, 6);
  const Curve c = forward_curve(f.map, path_for(3));
  const auto grid = uniform_grid(-1.0, 1.0, 201);
  LiftOptions lo;
  lo.diagnostics = false;
  const LiftResult r = lift_curve(f.group, f.map, c, grid, lo);
  const ReductionPlan plan = build_reduction(f.group, irreducible_decomposition(f.group), f.system.numeric);
  for (auto _ : state) benchmark::DoNotOptimize(reduction_check(plan, f.map, c, r).max_mismatch);
}
BENCHMARK(BM_ReductionCheck)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
