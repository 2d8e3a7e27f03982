#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "orbitlift/curve.hpp"
#include "orbitlift/grouprep.hpp"
#include "orbitlift/invariants.hpp"
#include "orbitlift/lifting.hpp"

namespace orbitlift {

// Ambient group given by samples: either all elements of a finite group or
// a rotation family with skew generators of its one-parameter subgroups.
struct GroupSampler {
  std::string family;                     // "finite", "so2", "so3", "so<n>"
  int dimension = 0;
  std::vector<Eigen::MatrixXd> algebra;   // skew generators
  std::vector<Eigen::MatrixXd> elements;  // finite case only

  bool finite() const { return algebra.empty(); }
  Eigen::MatrixXd sample(std::mt19937_64& rng) const;
  // exp(sum theta_i L_i)
  Eigen::MatrixXd exp(const Eigen::VectorXd& theta) const;
};

GroupSampler so_sampler(int n);
GroupSampler finite_sampler(const FiniteGroup& group);
// "finite" is rejected here; accepts "sampler:so2", "sampler:so3", "sampler:so<n>".
GroupSampler parse_sampler(const std::string& ambient);

struct PolarSpec {
  GroupSampler ambient;
  Eigen::MatrixXd section;          // orthonormal columns
  FiniteGroup weyl;                 // acting on section coordinates
  GeneratorSystem<double> system;   // invariants on V
};

struct WeylOptions {
  std::size_t cap = 1000;
  int starts = 64;
  std::uint64_t seed = 1;
  double tol = 1e-6;
};

// N_G(S) restricted to S, deduplicated modulo Z_G(S).
FiniteGroup weyl_group(const GroupSampler& ambient, const Eigen::MatrixXd& section, const WeylOptions& options = {});

// sigma restricted to S in section coordinates; checked W-invariant.
GeneratorSystem<double> restrict_orbit_map(const GeneratorSystem<double>& system, const Eigen::MatrixXd& section,
                                           const FiniteGroup& weyl);

// |x|^2 for rotation families, generated invariants up to cap otherwise.
GeneratorSystem<double> ambient_invariants(const GroupSampler& ambient, int cap = 0);

PolarSpec make_polar_spec(const GroupSampler& ambient, const Eigen::MatrixXd& section, int cap = 0,
                          const WeylOptions& options = {});

struct PolarCertificate {
  double max_distance = 0.0;  // orbit-to-section distance over sampled orbits
  double max_tangent = 0.0;   // |<tau, s>| / (|tau| |s|) at intersection points
  bool passed = false;
};

PolarCertificate validate_polar(const PolarSpec& spec, int samples = 100, std::uint64_t seed = 1,
                                double tol = 1e-6);

// Orbit tangents at x by central differences of one-parameter subgroups.
std::vector<Eigen::VectorXd> orbit_tangents(const GroupSampler& ambient, const Eigen::VectorXd& x, double h = 1e-5);

struct PolarLiftResult {
  LiftResult lift;          // in V
  LiftResult section_lift;  // in section coordinates
  double max_orthogonality = 0.0;
  bool orthogonal = true;
};

PolarLiftResult polar_lift(const Curve& curve, const PolarSpec& spec, const std::vector<double>& grid,
                           const LiftOptions& options = {}, double orthogonality_tol = 1e-5);

// Separation of W-orbits by the restricted generators on random section points.
bool restriction_separates(const PolarSpec& spec, int samples = 100, std::uint64_t seed = 1);

struct CounterexampleReport {
  double max_residual = 0.0;           // sigma-residual of the three explicit lifts
  Eigen::Vector2d derivative_straight;  // (t, 0) at 2 pi
  Eigen::Vector2d derivative_turning;   // (t cos t, t sin t) at 2 pi
  double pair_error = 0.0;              // distance to (1,0) and (1,2 pi)
  std::vector<double> oscillation;      // per refinement level near 0
  bool residual_ok = false;
  bool pair_ok = false;
  bool oscillation_ok = false;
  bool passed() const { return residual_ok && pair_ok && oscillation_ok; }
};

CounterexampleReport so2_counterexamples();

}  // namespace orbitlift
