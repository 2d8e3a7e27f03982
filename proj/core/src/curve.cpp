#include "orbitlift/curve.hpp"

#include <algorithm>
#include <cmath>

#include "orbitlift/error.hpp"

namespace orbitlift {

Curve::Curve(int dim, double start, double end, Evaluator eval, int smoothness)
    : dim_(dim), start_(start), end_(end), smoothness_(smoothness), eval_(std::move(eval)) {
  if (!(end > start)) fail(ErrorKind::invalid_argument, "curve domain must have start < end");
}

Eigen::VectorXd Curve::value(double t) const {
  Eigen::VectorXd v;
  eval_(t, &v, nullptr);
  return v;
}

Eigen::VectorXd Curve::derivative(double t) const {
  Eigen::VectorXd d;
  eval_(t, nullptr, &d);
  return d;
}

Curve Curve::restricted(double start, double end) const {
  Curve c = *this;
  c.start_ = start;
  c.end_ = end;
  return c;
}

Eigen::VectorXd central_difference(const std::function<Eigen::VectorXd(double)>& f, double t, double h) {
  return (f(t - 2 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2 * h)) / (12.0 * h);
}

Curve Curve::polynomial(const std::vector<PolyComponent>& components, double start, double end) {
  const int dim = static_cast<int>(components.size());
  auto eval = [components, dim](double t, Eigen::VectorXd* value, Eigen::VectorXd* derivative) {
    if (value) {
      value->setZero(dim);
      for (int i = 0; i < dim; ++i)
        for (const auto& [p, c] : components[i]) (*value)(i) += c * std::pow(t, p);
    }
    if (derivative) {
      derivative->setZero(dim);
      for (int i = 0; i < dim; ++i)
        for (const auto& [p, c] : components[i])
          if (p > 0) (*derivative)(i) += c * p * std::pow(t, p - 1);
    }
  };
  return Curve(dim, start, end, eval, kSmooth);
}

Curve Curve::from_function(int dim, double start, double end, std::function<Eigen::VectorXd(double)> f,
                           int smoothness, double fd_step) {
  auto eval = [f, fd_step](double t, Eigen::VectorXd* value, Eigen::VectorXd* derivative) {
    if (value) *value = f(t);
    if (derivative) *derivative = central_difference(f, t, fd_step * std::max(1.0, std::abs(t)));
  };
  return Curve(dim, start, end, eval, smoothness);
}

namespace {

struct Spline {
  std::vector<double> t, y, m;  // m: second derivatives

  Spline(std::vector<double> times, std::vector<double> values) : t(std::move(times)), y(std::move(values)) {
    const std::size_t n = t.size();
    m.assign(n, 0.0);
    if (n < 3) return;
    std::vector<double> sub(n, 0.0), diag(n, 1.0), sup(n, 0.0), rhs(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = t[i] - t[i - 1];
      const double h1 = t[i + 1] - t[i];
      sub[i] = h0;
      diag[i] = 2.0 * (h0 + h1);
      sup[i] = h1;
      rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    for (std::size_t i = 1; i < n; ++i) {
      const double w = sub[i] / diag[i - 1];
      diag[i] -= w * sup[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    m[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
  }

  void eval(double x, double* value, double* derivative) const {
    const std::size_t n = t.size();
    std::size_t i = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), x) - t.begin());
    i = std::clamp<std::size_t>(i, 1, n - 1) - 1;
    const double h = t[i + 1] - t[i];
    const double a = (t[i + 1] - x) / h;
    const double b = (x - t[i]) / h;
    if (value)
      *value = a * y[i] + b * y[i + 1] + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0;
    if (derivative)
      *derivative = (y[i + 1] - y[i]) / h - (3 * a * a - 1) * h * m[i] / 6.0 + (3 * b * b - 1) * h * m[i + 1] / 6.0;
  }
};

}  // namespace

Curve Curve::from_samples(const std::vector<double>& times, const std::vector<Eigen::VectorXd>& values) {
  if (times.size() < 2 || times.size() != values.size()) fail(ErrorKind::invalid_argument, "need at least two samples");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) fail(ErrorKind::invalid_argument, "sample times must increase");
  const int dim = static_cast<int>(values.front().size());
  std::vector<Spline> splines;
  for (int c = 0; c < dim; ++c) {
    std::vector<double> y;
    for (const auto& v : values) y.push_back(v(c));
    splines.emplace_back(times, std::move(y));
  }
  auto eval = [splines, dim](double t, Eigen::VectorXd* value, Eigen::VectorXd* derivative) {
    if (value) value->resize(dim);
    if (derivative) derivative->resize(dim);
    for (int c = 0; c < dim; ++c) {
      double v = 0.0, d = 0.0;
      splines[c].eval(t, value ? &v : nullptr, derivative ? &d : nullptr);
      if (value) (*value)(c) = v;
      if (derivative) (*derivative)(c) = d;
    }
  };
  return Curve(dim, times.front(), times.back(), eval, 2);
}

std::vector<double> uniform_grid(double a, double b, int count) {
  if (count < 2 || !(b > a)) fail(ErrorKind::invalid_argument, "grid needs count >= 2 and a < b");
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = a + (b - a) * i / (count - 1);
  g.back() = b;
  return g;
}

}  // namespace orbitlift
