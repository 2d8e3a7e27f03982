#include "orbitlift/orbit_map.hpp"

#include <cmath>

#include "orbitlift/error.hpp"

namespace orbitlift {

OrbitMap::OrbitMap(const GeneratorSystem<double>& system)
    : nvars_(system.nvars), degrees_(system.degrees), system_(system) {
  for (const auto& g : system.generators) {
    std::vector<Term> terms;
    for (const auto& [e, c] : g.terms()) {
      terms.push_back({c, e});
      max_degree_ = std::max(max_degree_, total_degree(e));
    }
    terms_.push_back(std::move(terms));
  }
  const int n = static_cast<int>(system.generators.size());
  if (system.norm_index) {
    norm_expression_ = Poly<double>::variable(n, static_cast<int>(*system.norm_index));
  } else {
    norm_expression_ = express_in_generators(Poly<double>::norm_square(nvars_), system);
  }
}

Eigen::VectorXd OrbitMap::eval(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd pw(nvars_, max_degree_ + 1);
  for (int j = 0; j < nvars_; ++j) {
    pw(j, 0) = 1.0;
    for (int k = 1; k <= max_degree_; ++k) pw(j, k) = pw(j, k - 1) * x(j);
  }
  Eigen::VectorXd out(output_dim());
  for (int i = 0; i < output_dim(); ++i) {
    double acc = 0.0;
    for (const auto& t : terms_[i]) {
      double v = t.coefficient;
      for (int j = 0; j < nvars_; ++j) v *= pw(j, t.exponent[j]);
      acc += v;
    }
    out(i) = acc;
  }
  return out;
}

Eigen::MatrixXd OrbitMap::jacobian(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd pw(nvars_, max_degree_ + 1);
  for (int j = 0; j < nvars_; ++j) {
    pw(j, 0) = 1.0;
    for (int k = 1; k <= max_degree_; ++k) pw(j, k) = pw(j, k - 1) * x(j);
  }
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(output_dim(), nvars_);
  for (int i = 0; i < output_dim(); ++i)
    for (const auto& t : terms_[i])
      for (int j = 0; j < nvars_; ++j) {
        if (t.exponent[j] == 0) continue;
        double v = t.coefficient * t.exponent[j] * pw(j, t.exponent[j] - 1);
        for (int l = 0; l < nvars_; ++l)
          if (l != j) v *= pw(l, t.exponent[l]);
        jac(i, j) += v;
      }
  return jac;
}

double OrbitMap::norm_square(const Eigen::VectorXd& c) const { return norm_expression_.evaluate(c); }

Eigen::VectorXd OrbitMap::scale(const Eigen::VectorXd& c, double r) const {
  Eigen::VectorXd out(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) out(i) = c(i) / std::pow(r, degrees_[i]);
  return out;
}

Eigen::VectorXd orbit_map_eval(const GeneratorSystem<double>& system, const Eigen::VectorXd& x) {
  if (x.size() != system.nvars) fail(ErrorKind::invalid_argument, "point dimension mismatch");
  Eigen::VectorXd out(static_cast<Eigen::Index>(system.size()));
  for (std::size_t i = 0; i < system.size(); ++i) out(static_cast<Eigen::Index>(i)) = system.generators[i].evaluate(x);
  return out;
}

FiberSolution solve_fiber(const OrbitMap& map, const Eigen::VectorXd& target, const Eigen::VectorXd& start,
                          const FiberSolveOptions& options) {
  FiberSolution sol;
  const int m = map.input_dim();
  const double r2 = map.norm_square(target);
  const double tscale = std::max(1.0, target.cwiseAbs().maxCoeff());
  if (!(r2 > 1e-300)) {
    sol.x = Eigen::VectorXd::Zero(m);
    sol.residual = target.cwiseAbs().maxCoeff() / tscale;
    sol.converged = sol.residual <= 1e-12 || r2 == 0.0;
    return sol;
  }
  const double r = std::sqrt(r2);
  const Eigen::VectorXd goal = map.scale(target, r);
  const double gscale = std::max(1.0, goal.cwiseAbs().maxCoeff());
  Eigen::VectorXd u = start / r;
  if (!(u.norm() > 1e-12) || !u.allFinite()) u = Eigen::VectorXd::Unit(m, 0);

  Eigen::VectorXd f = map.eval(u) - goal;
  double fn2 = f.squaredNorm();
  double lambda = 1e-6;
  for (int it = 0; it < options.max_iterations; ++it) {
    if (f.cwiseAbs().maxCoeff() <= options.tol * gscale) break;
    const Eigen::MatrixXd jac = map.jacobian(u);
    const Eigen::MatrixXd a = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * f;
    const double diag_scale = std::max(1.0, a.diagonal().maxCoeff());
    bool improved = false;
    for (int inner = 0; inner < 40; ++inner) {
      Eigen::MatrixXd damped = a;
      damped.diagonal().array() += lambda * diag_scale;
      const Eigen::VectorXd step = -damped.ldlt().solve(g);
      const Eigen::VectorXd trial = u + step;
      const Eigen::VectorXd ft = map.eval(trial) - goal;
      const double ftn2 = ft.squaredNorm();
      if (ftn2 < fn2 && std::isfinite(ftn2)) {
        u = trial;
        f = ft;
        fn2 = ftn2;
        lambda = std::max(lambda / 5.0, 1e-16);
        improved = true;
        break;
      }
      lambda *= 4.0;
      if (lambda > 1e12) break;
    }
    if (!improved) break;
  }
  sol.x = r * u;
  sol.residual = f.cwiseAbs().maxCoeff() / gscale;
  sol.converged = sol.residual <= std::max(options.tol, 1e-14) * 100.0;
  return sol;
}

}  // namespace orbitlift
