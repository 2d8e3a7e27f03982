#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <filesystem>

#include "orbitlift/catalog.hpp"
#include "orbitlift/error.hpp"
#include "orbitlift/io.hpp"

using namespace orbitlift;
using nlohmann::json;

namespace {

GeneratorSystem<double> system_of(const std::string& family, int n, int cap) {
  InvariantOptions o;
  o.cap = cap;
  return generate_invariants(enumerate_group(catalog(family, {n})), o).numeric;
}

}  // namespace

TEST(GroupJson, RoundTripExact) {
  const GroupSpec h = catalog("H3");
  const GroupSpec back = group_spec_from_json(group_spec_to_json(h));
  EXPECT_EQ(back.field.label(), h.field.label());
  ASSERT_EQ(back.exact_generators.size(), h.exact_generators.size());
  for (std::size_t i = 0; i < h.exact_generators.size(); ++i) EXPECT_EQ(back.exact_generators[i], h.exact_generators[i]);
  EXPECT_EQ(enumerate_group(back).order(), 120u);
}

TEST(GroupJson, Entries) {
  const GroupSpec s = group_spec_from_json(
      R"({"name": "rot", "dimension": 2, "field": "sqrt:3", "generators": [[["-1/2", [0, "-1/2"]], [[0, "1/2"], "-1/2"]]]})");
  EXPECT_EQ(enumerate_group(s).order(), 3u);
  EXPECT_THROW(group_spec_from_json("{\"generators\": 3}"), Error);
  EXPECT_THROW(group_spec_from_json("not json"), Error);
}

TEST(SystemJson, RoundTrip) {
  const auto sys = system_of("T", 0, 6);
  const auto back = system_from_json(system_to_json(sys));
  EXPECT_EQ(back.degrees, sys.degrees);
  ASSERT_EQ(back.size(), sys.size());
  const Eigen::Vector3d x(0.3, -1.2, 0.7);
  EXPECT_LE((orbit_map_eval(back, x) - orbit_map_eval(sys, x)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(back.norm_index, sys.norm_index);
}

TEST(SystemJson, RejectsInhomogeneous) {
  EXPECT_THROW(system_from_json(R"({"nvars": 1, "degrees": [2], "gens": [{"terms": [{"exp": [2], "coef": "1"}, {"exp": [1], "coef": "1"}]}]})"),
               Error);
}

TEST(Coefficient, Parse) {
  EXPECT_DOUBLE_EQ(parse_coefficient("3/4"), 0.75);
  EXPECT_NEAR(parse_coefficient("1/2+1/2*sqrt(5)"), (1 + std::sqrt(5.0)) / 2, 1e-15);
  EXPECT_DOUBLE_EQ(parse_coefficient("-2.5"), -2.5);
}

TEST(CurveJson, Forms) {
  const auto sys = system_of("Sn", 2, 2);
  const OrbitMap map(sys);
  const CurveInput poly = curve_from_json(R"({"components": [[[0, 1], [2, 3]], [[1, -1]]], "start": 0, "end": 2})");
  EXPECT_DOUBLE_EQ(poly.curve.value(2.0)(0), 13.0);
  EXPECT_DOUBLE_EQ(poly.curve.derivative(2.0)(1), -1.0);
  EXPECT_EQ(poly.curve.start(), 0.0);
  EXPECT_FALSE(poly.path.has_value());

  const CurveInput path = curve_from_json(R"({"path": [[[1, 1]], [[1, -1]]]})", &map);
  ASSERT_TRUE(path.path.has_value());
  EXPECT_LE((path.curve.value(0.5) - map.eval(Eigen::Vector2d(0.5, -0.5))).norm(), 1e-15);
  EXPECT_EQ(path.curve.start(), -1.0);
  EXPECT_THROW(curve_from_json(R"({"path": [[[1, 1]]]})", nullptr), Error);

  const CurveInput samples = curve_from_json(R"({"samples": [[0, 0], [0.5, 0.25], [1, 1], [1.5, 2.25]]})");
  EXPECT_FALSE(samples.warnings.empty());
  EXPECT_NEAR(samples.curve.value(1.0)(0), 1.0, 1e-12);
  EXPECT_EQ(samples.curve.smoothness(), 2);
}

TEST(Csv, ParseAndLiftTable) {
  const auto rows = parse_csv_numbers("t,a\n0,1\n1,2.5\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_DOUBLE_EQ(rows[1][1], 2.5);
  EXPECT_THROW(parse_csv_numbers("0,1\n1,x\n"), Error);

  LiftResult r;
  r.grid = {0.0, 0.5};
  r.points = {Eigen::Vector2d(1.0 / 3.0, -2), Eigen::Vector2d(0.1, 0.2)};
  r.derivatives = {Eigen::Vector2d(0, 1), Eigen::Vector2d(1e-17, 3)};
  r.residuals = {0.0, 1e-15};
  const std::string csv = lift_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,x1,x2,dx1,dx2,residual");
  const LiftTable back = lift_table_from_csv(csv);
  ASSERT_EQ(back.grid.size(), 2u);
  EXPECT_EQ(back.points[0](0), 1.0 / 3.0);
  EXPECT_EQ(back.derivatives[1](0), 1e-17);
  EXPECT_EQ(lift_csv(r), csv);
}

TEST(Csv, RootTrackHeader) {
  RootTrack t;
  t.times = {0.0};
  t.roots = {Eigen::Vector2d(1, 2)};
  t.derivatives = {Eigen::Vector2d(0, 0)};
  const std::string csv = root_track_csv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,x1,x2,dx1,dx2");
}

TEST(Json, DiagnosticsShape) {
  LiftResult r;
  r.grid = {0.0, 1.0};
  r.points = {Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 1)};
  r.derivatives = {Eigen::Vector2d(0, 1), Eigen::Vector2d(0, 1)};
  r.residuals = {0.0, 0.0};
  r.glue_log = {{0.5, 3}};
  r.diagnostics.bounds = {{0.0, 1.0, 1.0}};
  const json d = json::parse(diagnostics_json(r));
  for (const char* key : {"scale", "max_residual", "derivative_bounds", "c1_modulus", "second_differences", "zero_set"})
    EXPECT_TRUE(d.contains(key)) << key;
  EXPECT_TRUE(d["zero_set"]["heuristic"].get<bool>());
  const json g = json::parse(glue_log_json(r));
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0]["element_index"].get<int>(), 3);
  EXPECT_EQ(g[0]["t"].get<double>(), 0.5);
}

TEST(PolarJson, SectionSpec) {
  const PolarSpec spec = polar_spec_from_json(
      R"({"ambient": "sampler:so2", "section": [[1, 0]], "weyl": {"name": "pm1", "field": "rational", "generators": [[["-1"]]]}})");
  EXPECT_EQ(spec.weyl.order(), 2u);
  EXPECT_EQ(spec.section.rows(), 2);
  EXPECT_THROW(polar_spec_from_json(
                   R"({"ambient": "sampler:so2", "section": [[1, 0]], "weyl": {"name": "one", "field": "rational", "generators": [[["1"]]]}})"),
               Error);
}

TEST(Files, AtomicWrite) {
  const auto dir = std::filesystem::temp_directory_path() / "orbitlift_io_test";
  std::filesystem::create_directories(dir);
  write_text_atomic(dir / "a.txt", "hello\n");
  EXPECT_EQ(read_text(dir / "a.txt"), "hello\n");
  write_text_atomic(dir / "a.txt", "again\n");
  EXPECT_EQ(read_text(dir / "a.txt"), "again\n");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 1u);
  EXPECT_THROW(read_text(dir / "missing.txt"), Error);
  std::filesystem::remove_all(dir);
}
