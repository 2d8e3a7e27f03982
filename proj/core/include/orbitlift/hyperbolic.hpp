#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "orbitlift/curve.hpp"

namespace orbitlift {

// Coefficients a_1..a_n of P_a(y) = y^n + sum_j (-1)^j a_j y^{n-j}.
using HyperbolicCoefficients = Eigen::VectorXd;

struct RootOptions {
  double imag_tol = 1e-8;
};

// Real roots in ascending order; NotHyperbolic when a root is clearly complex.
std::vector<double> roots_real(const HyperbolicCoefficients& a, const RootOptions& options = {});

// Monic polynomial y^n + c_1 y^{n-1} + ... + c_n in the plain sign convention.
std::vector<double> roots_real_monic(const std::vector<double>& c, const RootOptions& options = {});

// a_j = e_j(roots)
HyperbolicCoefficients coefficients_from_roots(const std::vector<double>& roots);

struct TrackOptions {
  RootOptions roots;
  bool refine_near_collisions = true;
  double safety = 10.0;  // GridTooCoarse when step speed jumps by more than this
};

struct RootTrack {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> roots;        // one vector per time, tracked order
  std::vector<Eigen::VectorXd> derivatives;  // finite differences along the track
};

// Tracks roots along a hyperbolic coefficient curve over the grid (plus one
// level of refinement next to near-collisions).
RootTrack track_roots(const Curve& coefficients, const std::vector<double>& grid, const TrackOptions& options = {});

// Tracks roots from coefficient samples on a fixed grid, no refinement.
RootTrack track_roots_sampled(const std::vector<double>& times, const std::vector<HyperbolicCoefficients>& samples,
                              const TrackOptions& options = {});

// Minimal-cost assignment: result[i] is the column given to row i.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

struct DerivativeBound {
  double value = 0.0;
  double resolution = 0.0;  // largest grid step inside the compact
};

// max |x_j'(t)| over interior grid points of [a, b].
DerivativeBound derivative_bound(const RootTrack& track, double a, double b);

struct MultiplicityResult {
  int order = 0;
  bool flat = false;  // vanishes to every tested order
};

// Vanishing order of f at t0 via dyadic ratio tests |f(t)| / |t - t0|^m.
MultiplicityResult multiplicity(const std::function<double(double)>& f, double t0, int max_order,
                                double window = 0.1);

struct DesingularizeOptions {
  double zero_tol = 1e-9;     // |c(t0)| relative to the window scale
  double fill_radius = 1e-3;  // removable-singularity fill radius
  double window = 0.1;        // multiplicity test window
  std::function<bool(const Eigen::VectorXd&)> in_image;  // optional membership check
};

// c_(1)(t) = ((t - t0)^{-d_1} c_1(t), ..., (t - t0)^{-d_n} c_n(t)).
Curve desingularize(const Curve& c, double t0, const std::vector<int>& degrees,
                    const std::function<double(const Eigen::VectorXd&)>& norm_square,
                    const DesingularizeOptions& options = {});

}  // namespace orbitlift
