#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <utility>
#include <vector>

namespace orbitlift {

// A vector-valued curve on [start, end] with first derivative. Curves built
// from a bare function get their derivative from a fourth-order central
// difference.
class Curve {
 public:
  using Evaluator = std::function<void(double t, Eigen::VectorXd* value, Eigen::VectorXd* derivative)>;
  static constexpr int kSmooth = 1000;  // C^infinity

  Curve() = default;
  Curve(int dim, double start, double end, Evaluator eval, int smoothness = kSmooth);

  // Sum over (power, coefficient) pairs per component.
  using PolyComponent = std::vector<std::pair<int, double>>;
  static Curve polynomial(const std::vector<PolyComponent>& components, double start, double end);
  // Natural cubic spline through the samples, one spline per component.
  static Curve from_samples(const std::vector<double>& times, const std::vector<Eigen::VectorXd>& values);
  static Curve from_function(int dim, double start, double end, std::function<Eigen::VectorXd(double)> f,
                             int smoothness = kSmooth, double fd_step = 1e-4);

  int dim() const { return dim_; }
  double start() const { return start_; }
  double end() const { return end_; }
  int smoothness() const { return smoothness_; }
  bool valid() const { return static_cast<bool>(eval_); }

  Eigen::VectorXd value(double t) const;
  Eigen::VectorXd derivative(double t) const;
  void evaluate(double t, Eigen::VectorXd* value, Eigen::VectorXd* derivative) const { eval_(t, value, derivative); }

  Curve restricted(double start, double end) const;

 private:
  int dim_ = 0;
  double start_ = 0.0;
  double end_ = 0.0;
  int smoothness_ = kSmooth;
  Evaluator eval_;
};

// Fourth-order central difference of a vector function.
Eigen::VectorXd central_difference(const std::function<Eigen::VectorXd(double)>& f, double t, double h);

std::vector<double> uniform_grid(double a, double b, int count);

}  // namespace orbitlift
