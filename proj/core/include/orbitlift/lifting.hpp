#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "orbitlift/curve.hpp"
#include "orbitlift/grouprep.hpp"
#include "orbitlift/hyperbolic.hpp"
#include "orbitlift/invariants.hpp"
#include "orbitlift/orbit_map.hpp"

namespace orbitlift {

struct LiftOptions {
  double newton_tol = 1e-16;    // normalized continuation target; iteration also stops on stagnation
  int max_bisections = 6;
  double zero_tol = 1e-10;      // c_1 <= zero_tol * scale marks a zero
  double residual_tol = 1e-8;   // accepted final residual, relative to scale
  double match_tol = 1e-7;
  int max_depth = 8;
  int multistart = 64;
  std::uint64_t seed = 1;
  int k = 0;                    // regularity index used to gate diagnostics
  int refinement_levels = 3;    // for modulus and second-difference tables
  bool diagnostics = true;
  double fill_radius = 1e-3;
};

// A lift on a run of grid points.
struct LocalLift {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> points;
  std::vector<Eigen::VectorXd> derivatives;
  std::string kind;  // "regular", "zero", "flat", "pointwise"
};

struct GlueRecord {
  double t = 0.0;
  std::size_t element_index = 0;
};

struct CompactBound {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
};

struct ModulusRow {
  int level = 0;
  double step = 0.0;
  double modulus = 0.0;  // max |c'(t_{i+1}) - c'(t_i)| over the grid
};

struct SecondDifferenceRow {
  double t = 0.0;
  int level = 0;
  double step = 0.0;
  double value = 0.0;
};

struct ZeroSet {
  std::vector<double> zeros;                         // isolated zeros of c
  std::vector<std::pair<double, double>> flat_zones;  // merged zero runs
  std::vector<double> E;                             // accumulation points of zeros
  std::vector<double> F_isolated;                    // lift and derivative vanish, isolated
  std::vector<double> F_accumulation;                // accumulation points of those
  bool heuristic = true;                             // window-based classification
};

struct LiftDiagnostics {
  double max_residual = 0.0;
  std::vector<CompactBound> bounds;
  std::vector<ModulusRow> modulus;
  bool modulus_emitted = false;
  bool modulus_monotone = false;
  std::vector<SecondDifferenceRow> second_differences;
  bool second_differences_emitted = false;
  bool second_differences_bounded = false;
  std::vector<std::string> warnings;
};

struct LiftResult {
  std::vector<double> grid;
  std::vector<Eigen::VectorXd> points;
  std::vector<Eigen::VectorXd> derivatives;
  std::vector<double> residuals;  // |sigma(x) - c(t)|_inf / scale
  std::vector<GlueRecord> glue_log;
  LiftDiagnostics diagnostics;
  ZeroSet zero_set;
  double scale = 1.0;
};

// max(1, max |c(t)|_inf) over the grid
double curve_scale(const Curve& c, const std::vector<double>& grid);

// Forward curve t -> sigma(gamma(t)) with derivative J(gamma(t)) gamma'(t).
Curve forward_curve(const OrbitMap& map, const Curve& path);

// A point with sigma(x) = c from multistart least squares, reported as the
// lexicographically largest member of its orbit.
Eigen::VectorXd find_preimage(const FiniteGroup& group, const OrbitMap& map, const Eigen::VectorXd& c,
                              const LiftOptions& options = {});

// Orbit member of x closest to target; returns its element index.
std::size_t nearest_in_orbit(const FiniteGroup& group, const Eigen::VectorXd& x, const Eigen::VectorXd& target);

// Least-squares solution of J(x) x' = c'.
Eigen::VectorXd lift_velocity(const OrbitMap& map, const Eigen::VectorXd& x, const Eigen::VectorXd& dc);

// Newton continuation from seed at times.front() through the remaining
// times (ascending or descending).
LocalLift lift_regular(const FiniteGroup& group, const OrbitMap& map, const Curve& curve,
                       const std::vector<double>& times, const Eigen::VectorXd& seed, const LiftOptions& options = {});

struct SliceProblem {
  FiniteGroup stabilizer;             // G_v acting on V
  GeneratorSystem<double> system;     // invariants of G_v
  Curve curve;                        // t -> tau(x(t) - v) on the window
  Eigen::VectorXd offset;             // v
};

// Reduces lifting near c(t0) = sigma(v) to lifting the recentred curve for
// G_v; a lift y of the reduced curve gives the lift v + y.
SliceProblem slice_reduce(const FiniteGroup& group, const OrbitMap& map, const Curve& curve, double t0,
                          const Eigen::VectorXd& v, double window, const LiftOptions& options = {});

// Lift on times near a zero t0 of c via desingularization.
LocalLift lift_through_zero(const FiniteGroup& group, const OrbitMap& map, const Curve& curve, double t0,
                            const std::vector<double>& times, const LiftOptions& options = {}, int depth = 0);

struct DerivativeMatch {
  std::size_t h = 0;  // in the stabilizer of a
  std::size_t g = 0;  // a = g b
  std::size_t combined = 0;  // h g
};

// (h, g) with a = g b and a' = h g b', lexicographically first.
DerivativeMatch match_derivative(const FiniteGroup& group, const Eigen::VectorXd& a, const Eigen::VectorXd& da,
                                 const Eigen::VectorXd& b, const Eigen::VectorXd& db, double tol = 1e-7);

// Glues consecutive overlapping local lifts left to right.
LiftResult glue_lifts(const FiniteGroup& group, const OrbitMap& map, const std::vector<LocalLift>& locals,
                      const LiftOptions& options = {});

// Global lift of c on the grid with diagnostics.
LiftResult lift_curve(const FiniteGroup& group, const OrbitMap& map, const Curve& curve,
                      const std::vector<double>& grid, const LiftOptions& options = {});

// Grid with 2^level - 1 points inserted in every step.
std::vector<double> refine_grid(const std::vector<double>& grid, int level);

struct ReductionComponent {
  Eigen::MatrixXd basis;                 // component subspace
  Eigen::VectorXd base_point;            // v_i
  std::vector<std::size_t> cosets;       // representatives g of G_{v_i}\G
  Eigen::MatrixXd functionals;           // rows: F_{i,g} = <v_i | g x>
  std::vector<Poly<double>> expressions; // p_{i,j} with a_{i,j} = p_{i,j}(sigma)
  int k = 0;
};

struct ReductionPlan {
  std::vector<ReductionComponent> components;
  int k = 0;
};

ReductionPlan build_reduction(const FiniteGroup& group, const Decomposition& decomposition,
                              const GeneratorSystem<double>& system, std::uint64_t seed = 1);

// a_{i,1..k_i}(x) as polynomials in x.
std::vector<Poly<double>> reduction_coefficients(const ReductionComponent& component, int nvars);

struct ReductionComponentReport {
  double max_mismatch = 0.0;
  double track_bound = 0.0;  // C_K of the tracked roots
  double lift_bound = 0.0;   // |v_i| max |c'|
};

struct ReductionReport {
  bool passed = true;
  double max_mismatch = 0.0;
  double worst_time = 0.0;
  std::vector<ReductionComponentReport> components;
};

ReductionReport reduction_check(const ReductionPlan& plan, const OrbitMap& map, const Curve& curve,
                                const LiftResult& lift, double tol = 1e-7);

}  // namespace orbitlift
