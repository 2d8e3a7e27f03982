#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "orbitlift/curve.hpp"
#include "orbitlift/grouprep.hpp"
#include "orbitlift/hyperbolic.hpp"
#include "orbitlift/invariants.hpp"
#include "orbitlift/lifting.hpp"
#include "orbitlift/orbit_map.hpp"
#include "orbitlift/polar.hpp"

namespace orbitlift {

std::string read_text(const std::filesystem::path& path);
// Writes through a temporary file in the same directory and renames it.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

// {"name", "dimension", "field", "generators"}; entries are decimal strings,
// "p/q" rationals, plain numbers, or [a, b] for a + b sqrt(D).
GroupSpec group_spec_from_json(const std::string& text);
std::string group_spec_to_json(const GroupSpec& spec);

// {"nvars", "degrees", "norm_index", "gens": [{"terms": [{"exp", "coef"}]}]}
std::string system_to_json(const InvariantSystem& system);
std::string system_to_json(const GeneratorSystem<double>& system);
GeneratorSystem<double> system_from_json(const std::string& text);
double parse_coefficient(const std::string& text);

struct CurveInput {
  Curve curve;
  std::optional<Curve> path;  // set when the curve is sigma of a path in V
  std::vector<std::string> warnings;
};

// Polynomial components {"components": [[[power, coef], ...], ...]}, a path in
// V {"path": ...} pushed through the orbit map, or samples {"samples": file
// or [[t, c1, ...], ...]} interpolated by cubic splines. "start", "end" and
// "smoothness" are optional.
CurveInput curve_from_json(const std::string& text, const OrbitMap* map = nullptr,
                           const std::filesystem::path& base_dir = {});

// t,v1,...,vn rows with an optional header.
std::vector<std::vector<double>> parse_csv_numbers(const std::string& text);

std::string root_track_csv(const RootTrack& track);

std::string lift_csv(const LiftResult& result);

struct LiftTable {
  std::vector<double> grid;
  std::vector<Eigen::VectorXd> points;
  std::vector<Eigen::VectorXd> derivatives;
  std::vector<double> residuals;
};

LiftTable lift_table_from_csv(const std::string& text);
std::string glue_log_json(const LiftResult& result);
std::string diagnostics_json(const LiftResult& result);

std::string reduction_plan_json(const ReductionPlan& plan);
std::string reduction_report_json(const ReductionReport& report);

// {"section": [[basis vector], ...], "weyl": GroupSpec, "ambient": "finite" | "sampler:so<n>"}
// with an optional "group" GroupSpec for a finite ambient group; without it
// the ambient group is the declared Weyl group.
PolarSpec polar_spec_from_json(const std::string& text, int cap = 0);

}  // namespace orbitlift
