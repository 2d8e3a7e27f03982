#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "orbitlift/invariants.hpp"

namespace orbitlift {

// Numerical orbit map x -> (sigma_1(x), ..., sigma_n(x)) with Jacobian.
class OrbitMap {
 public:
  OrbitMap() = default;
  explicit OrbitMap(const GeneratorSystem<double>& system);

  int input_dim() const { return nvars_; }
  int output_dim() const { return static_cast<int>(terms_.size()); }
  const std::vector<int>& degrees() const { return degrees_; }
  const GeneratorSystem<double>& system() const { return system_; }

  Eigen::VectorXd eval(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;

  // |x|^2 as a polynomial in the invariants, evaluated at c.
  double norm_square(const Eigen::VectorXd& c) const;
  const Poly<double>& norm_expression() const { return norm_expression_; }

  // c_i / r^{d_i}
  Eigen::VectorXd scale(const Eigen::VectorXd& c, double r) const;

 private:
  struct Term {
    double coefficient;
    Exponent exponent;
  };

  int nvars_ = 0;
  int max_degree_ = 0;
  std::vector<int> degrees_;
  std::vector<std::vector<Term>> terms_;
  Poly<double> norm_expression_;
  GeneratorSystem<double> system_;
};

Eigen::VectorXd orbit_map_eval(const GeneratorSystem<double>& system, const Eigen::VectorXd& x);

struct FiberSolveOptions {
  int max_iterations = 80;
  double tol = 1e-12;  // relative residual after normalisation
};

struct FiberSolution {
  Eigen::VectorXd x;
  double residual = 0.0;  // normalised max-norm residual
  bool converged = false;
};

// Levenberg-Marquardt on the normalised equation sigma(u) = c / r^d with
// r = sqrt(|x|^2), started from start / r.
FiberSolution solve_fiber(const OrbitMap& map, const Eigen::VectorXd& target, const Eigen::VectorXd& start,
                          const FiberSolveOptions& options = {});

}  // namespace orbitlift
