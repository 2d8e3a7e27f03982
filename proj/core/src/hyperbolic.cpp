#include "orbitlift/hyperbolic.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#include "orbitlift/error.hpp"
#include "orbitlift/number.hpp"

namespace orbitlift {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void balance(Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  bool done = false;
  for (int sweep = 0; sweep < 100 && !done; ++sweep) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      double g = r / 2.0;
      while (c < g) {
        f *= 2.0;
        c *= 4.0;
      }
      g = r * 2.0;
      while (c >= g) {
        f /= 2.0;
        c /= 4.0;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

double eval_monic(const std::vector<double>& c, double x, double* derivative) {
  double p = 1.0, dp = 0.0;
  for (double cj : c) {
    dp = dp * x + p;
    p = p * x + cj;
  }
  if (derivative) *derivative = dp;
  return p;
}

Eigen::VectorXd nonuniform_derivative(const std::vector<double>& t, const std::vector<Eigen::VectorXd>& x,
                                      std::size_t i) {
  const std::size_t n = t.size();
  if (n < 2) return Eigen::VectorXd::Zero(x[i].size());
  if (i == 0) return (x[1] - x[0]) / (t[1] - t[0]);
  if (i == n - 1) return (x[n - 1] - x[n - 2]) / (t[n - 1] - t[n - 2]);
  const double h0 = t[i] - t[i - 1];
  const double h1 = t[i + 1] - t[i];
  return (-h1 / (h0 * (h0 + h1))) * x[i - 1] + ((h1 - h0) / (h0 * h1)) * x[i] + (h0 / (h1 * (h0 + h1))) * x[i + 1];
}

// roots of a monic polynomial whose roots have modulus of order one
std::vector<double> roots_unit(const std::vector<double>& c, const RootOptions& options) {
  const std::size_t n = c.size();
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) comp(0, static_cast<Eigen::Index>(j)) = -c[j];
  for (std::size_t i = 1; i < n; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  balance(comp);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, false);
  if (solver.info() != Eigen::Success) fail(ErrorKind::not_hyperbolic, "eigenvalue iteration failed");
  std::vector<std::complex<double>> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return a.real() < b.real(); });

  double scale = 1.0;
  for (const auto& z : ev) scale = std::max(scale, std::abs(z));
  // clusters by single linkage along the real axis
  std::vector<int> cluster(n, 0);
  const double link = 1e-3 * scale;
  for (std::size_t i = 1; i < n; ++i)
    cluster[i] = std::abs(ev[i] - ev[i - 1]) <= link ? cluster[i - 1] : cluster[i - 1] + 1;

  double coeff_size = std::pow(scale, static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) coeff_size += std::abs(c[j]) * std::pow(scale, static_cast<double>(n - 1 - j));

  std::vector<double> out(n);
  std::vector<int> cluster_size(n, 0);
  for (std::size_t i = 0; i < n; ++i) ++cluster_size[cluster[i]];
  for (std::size_t i = 0; i < n; ++i) {
    const int m = cluster_size[cluster[i]];
    std::complex<double> mean = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (cluster[j] == cluster[i]) mean += ev[j];
    mean /= static_cast<double>(m);
    double far = 1.0;
    for (std::size_t j = 0; j < n; ++j)
      if (cluster[j] != cluster[i]) far *= std::abs(mean - ev[j]);
    const double noise = std::pow(1e3 * kEps * coeff_size / std::max(far, 1e-300), 1.0 / m);
    const double allowed = std::max(options.imag_tol * (1.0 + std::abs(ev[i].real())), noise);
    if (std::abs(ev[i].imag()) > allowed)
      fail(ErrorKind::not_hyperbolic, "root " + format_double(ev[i].real()) + " has imaginary part " +
                                          format_double(ev[i].imag()));
    double x = ev[i].real();
    if (m == 1) {
      for (int it = 0; it < 3; ++it) {
        double dp = 0.0;
        const double p = eval_monic(c, x, &dp);
        if (dp == 0.0) break;
        const double nx = x - p / dp;
        if (std::abs(eval_monic(c, nx, nullptr)) < std::abs(p)) x = nx;
        else break;
      }
    }
    out[i] = x;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<double> roots_real_monic(const std::vector<double>& c, const RootOptions& options) {
  const std::size_t n = c.size();
  if (n == 0) return {};
  for (double x : c)
    if (!std::isfinite(x)) fail(ErrorKind::invalid_argument, "non-finite coefficient");
  if (n == 1) return {-c[0]};
  // y = s z with s = max |c_j|^(1/j), so the companion matrix sees roots of size one
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s = std::max(s, std::pow(std::abs(c[j]), 1.0 / static_cast<double>(j + 1)));
  if (s == 0.0) return std::vector<double>(n, 0.0);
  std::vector<double> scaled(n);
  for (std::size_t j = 0; j < n; ++j) scaled[j] = c[j] / std::pow(s, static_cast<double>(j + 1));
  std::vector<double> roots = roots_unit(scaled, options);
  for (double& r : roots) r *= s;
  return roots;
}

std::vector<double> roots_real(const HyperbolicCoefficients& a, const RootOptions& options) {
  std::vector<double> c(static_cast<std::size_t>(a.size()));
  for (Eigen::Index j = 0; j < a.size(); ++j) c[static_cast<std::size_t>(j)] = (j % 2 == 0 ? -1.0 : 1.0) * a(j);
  return roots_real_monic(c, options);
}

HyperbolicCoefficients coefficients_from_roots(const std::vector<double>& roots) {
  const std::size_t n = roots.size();
  std::vector<double> e(n + 1, 0.0);
  e[0] = 1.0;
  for (double r : roots)
    for (std::size_t j = n; j >= 1; --j) e[j] += e[j - 1] * r;
  HyperbolicCoefficients a(static_cast<Eigen::Index>(n));
  for (std::size_t j = 1; j <= n; ++j) a(static_cast<Eigen::Index>(j - 1)) = e[j];
  return a;
}

std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) fail(ErrorKind::invalid_argument, "assignment needs a square cost matrix");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> result(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) result[p[j] - 1] = j - 1;
  return result;
}

RootTrack track_roots_sampled(const std::vector<double>& times, const std::vector<HyperbolicCoefficients>& samples,
                              const TrackOptions& options) {
  if (times.size() != samples.size() || times.empty()) fail(ErrorKind::invalid_argument, "sample count mismatch");
  RootTrack track;
  track.times = times;
  const auto n = static_cast<Eigen::Index>(samples.front().size());
  double root_scale = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto r = roots_real(samples[i], options.roots);
    Eigen::VectorXd sorted = Eigen::Map<const Eigen::VectorXd>(r.data(), n);
    root_scale = std::max(root_scale, sorted.cwiseAbs().maxCoeff());
    if (i < 2) {
      if (i == 0) {
        track.roots.push_back(sorted);
        continue;
      }
    }
    Eigen::VectorXd pred = track.roots[i - 1];
    if (i >= 2) {
      const double ratio = (times[i] - times[i - 1]) / (times[i - 1] - times[i - 2]);
      pred += (track.roots[i - 1] - track.roots[i - 2]) * ratio;
    }
    Eigen::MatrixXd cost(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k) cost(j, k) = (pred(j) - sorted(k)) * (pred(j) - sorted(k));
    const auto assign = min_cost_assignment(cost);
    Eigen::VectorXd next(n);
    for (Eigen::Index j = 0; j < n; ++j) next(j) = sorted(assign[static_cast<std::size_t>(j)]);
    track.roots.push_back(next);
  }
  const double span = times.back() - times.front();
  const double floor_speed = (1.0 + root_scale) / std::max(span, 1e-300);
  double prev_speed = -1.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double speed = (track.roots[i] - track.roots[i - 1]).cwiseAbs().maxCoeff() / (times[i] - times[i - 1]);
    if (prev_speed >= 0.0 && speed > options.safety * std::max(prev_speed, floor_speed))
      fail(ErrorKind::grid_too_coarse, "root speed jumps near t = " + format_double(times[i]));
    prev_speed = speed;
  }
  for (std::size_t i = 0; i < times.size(); ++i) track.derivatives.push_back(nonuniform_derivative(times, track.roots, i));
  return track;
}

RootTrack track_roots(const Curve& coefficients, const std::vector<double>& grid, const TrackOptions& options) {
  std::vector<double> times = grid;
  if (options.refine_near_collisions && grid.size() >= 2) {
    std::vector<Eigen::VectorXd> sorted;
    for (double t : grid) {
      const auto r = roots_real(coefficients.value(t), options.roots);
      sorted.push_back(Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size())));
    }
    auto min_gap = [](const Eigen::VectorXd& r) {
      double g = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 1; j < r.size(); ++j) g = std::min(g, r(j) - r(j - 1));
      return g;
    };
    times.clear();
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      times.push_back(grid[i]);
      const double move = (sorted[i + 1] - sorted[i]).cwiseAbs().maxCoeff();
      const double gap = std::min(min_gap(sorted[i]), min_gap(sorted[i + 1]));
      if (gap < 2.0 * move) times.push_back(0.5 * (grid[i] + grid[i + 1]));
    }
    times.push_back(grid.back());
  }
  std::vector<HyperbolicCoefficients> samples;
  for (double t : times) samples.push_back(coefficients.value(t));
  return track_roots_sampled(times, samples, options);
}

DerivativeBound derivative_bound(const RootTrack& track, double a, double b) {
  DerivativeBound out;
  const std::size_t n = track.times.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double t = track.times[i];
    if (t < a || t > b) continue;
    out.value = std::max(out.value, track.derivatives[i].cwiseAbs().maxCoeff());
  }
  for (std::size_t i = 1; i < n; ++i)
    if (track.times[i - 1] >= a && track.times[i] <= b) out.resolution = std::max(out.resolution, track.times[i] - track.times[i - 1]);
  return out;
}

MultiplicityResult multiplicity(const std::function<double(double)>& f, double t0, int max_order, double window) {
  constexpr int kLevels = 4;
  const double fractions[] = {0.5, 0.75, 1.0};
  std::vector<std::vector<std::pair<double, double>>> samples(kLevels);
  bool all_zero = true;
  for (int k = 0; k < kLevels; ++k) {
    const double w = window / std::pow(2.0, k);
    for (double fr : fractions)
      for (double sign : {-1.0, 1.0}) {
        const double s = sign * fr * w;
        const double v = std::abs(f(t0 + s));
        if (v > 1e-300) all_zero = false;
        samples[k].emplace_back(std::abs(s), v);
      }
  }
  MultiplicityResult out;
  if (all_zero) {
    out.order = max_order;
    out.flat = true;
    return out;
  }
  out.order = -1;
  for (int m = 0; m <= max_order; ++m) {
    std::vector<double> ratio(kLevels, 0.0);
    for (int k = 0; k < kLevels; ++k)
      for (const auto& [s, v] : samples[k]) ratio[k] = std::max(ratio[k], v / std::pow(s, m));
    if (ratio[0] <= 0.0) {
      out.order = m;
      continue;
    }
    const double growth = std::pow(ratio[kLevels - 1] / ratio[0], 1.0 / (kLevels - 1));
    if (growth <= 1.3) {
      out.order = m;
    } else if (growth < 1.6) {
      fail(ErrorKind::inconclusive, "ratio test growth " + format_double(growth) + " at order " + std::to_string(m));
    } else {
      break;
    }
  }
  if (out.order < 0) out.order = 0;
  return out;
}

Curve desingularize(const Curve& c, double t0, const std::vector<int>& degrees,
                    const std::function<double(const Eigen::VectorXd&)>& norm_square,
                    const DesingularizeOptions& options) {
  if (static_cast<int>(degrees.size()) != c.dim()) fail(ErrorKind::invalid_argument, "degree count mismatch");
  const double lo = std::max(c.start(), t0 - options.window);
  const double hi = std::min(c.end(), t0 + options.window);
  double scale = 1.0;
  for (int k = 0; k <= 16; ++k) scale = std::max(scale, c.value(lo + (hi - lo) * k / 16.0).cwiseAbs().maxCoeff());
  if (c.value(t0).cwiseAbs().maxCoeff() > options.zero_tol * scale)
    fail(ErrorKind::invalid_argument, "curve does not vanish at t0 = " + format_double(t0));
  auto c1 = [&](double t) { return norm_square(c.value(t)); };
  for (int k = 0; k <= 16; ++k) {
    const double t = lo + (hi - lo) * k / 16.0;
    if (c1(t) < -options.zero_tol * scale) fail(ErrorKind::order_too_low, "norm component is negative near t0");
  }
  const double mwin = std::min(t0 - lo, hi - t0) > 0 ? std::min(t0 - lo, hi - t0) : options.window;
  const int max_degree = *std::max_element(degrees.begin(), degrees.end());
  const MultiplicityResult mult = multiplicity(c1, t0, 2 * max_degree + 2, mwin);
  if (!mult.flat && (mult.order < 2 || mult.order % 2 != 0))
    fail(ErrorKind::order_too_low, "norm component vanishes to order " + std::to_string(mult.order));

  const double rho = options.fill_radius;
  const bool two_sided = t0 - 2 * rho >= c.start() && t0 + 2 * rho <= c.end();
  const double side = t0 + 4 * rho <= c.end() ? 1.0 : -1.0;
  std::vector<double> nodes = two_sided ? std::vector<double>{-2 * rho, -rho, rho, 2 * rho}
                                        : std::vector<double>{side * rho, side * 2 * rho, side * 3 * rho, side * 4 * rho};
  const Curve base = c;
  const std::vector<int> deg = degrees;
  auto direct = [base, deg, t0](double t, Eigen::VectorXd* value, Eigen::VectorXd* derivative) {
    Eigen::VectorXd v, d;
    base.evaluate(t, &v, derivative ? &d : nullptr);
    const double s = t - t0;
    if (value) {
      value->resize(v.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) (*value)(i) = v(i) / std::pow(s, deg[i]);
    }
    if (derivative) {
      derivative->resize(v.size());
      for (Eigen::Index i = 0; i < v.size(); ++i)
        (*derivative)(i) = d(i) / std::pow(s, deg[i]) - deg[i] * v(i) / std::pow(s, deg[i] + 1);
    }
  };
  auto eval = [direct, nodes, rho, t0](double t, Eigen::VectorXd* value, Eigen::VectorXd* derivative) {
    const double s = t - t0;
    if (std::abs(s) >= rho) {
      direct(t, value, derivative);
      return;
    }
    // cubic Lagrange interpolation through the fill nodes
    std::vector<Eigen::VectorXd> y(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) direct(t0 + nodes[k], &y[k], nullptr);
    const Eigen::Index dim = y[0].size();
    if (value) value->setZero(dim);
    if (derivative) derivative->setZero(dim);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      double l = 1.0, dl = 0.0;
      for (std::size_t j = 0; j < nodes.size(); ++j) {
        if (j == k) continue;
        const double den = nodes[k] - nodes[j];
        dl = dl * (s - nodes[j]) / den + l / den;
        l *= (s - nodes[j]) / den;
      }
      if (value) *value += l * y[k];
      if (derivative) *derivative += dl * y[k];
    }
  };
  Curve residual(c.dim(), c.start(), c.end(), eval, std::max(0, c.smoothness() - max_degree));
  if (options.in_image) {
    for (int k = 0; k <= 8; ++k) {
      const double t = lo + (hi - lo) * k / 8.0;
      if (!options.in_image(residual.value(t)))
        fail(ErrorKind::not_in_image, "desingularized curve leaves the image near t = " + format_double(t));
    }
  }
  return residual;
}

}  // namespace orbitlift
