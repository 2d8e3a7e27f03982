#include "orbitlift/lifting.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "orbitlift/error.hpp"

namespace orbitlift {

namespace {

using Vec = Eigen::VectorXd;

constexpr double kAccept = 1e-14;  // normalized residual accepted after stagnation
constexpr double kSingularDip = 1e-2;  // regularity dip (relative to the segment maximum) that splits a segment
constexpr double kFiberTol = 1e-9;  // normalized distance to the fiber accepted in continuation
constexpr double kStepConsistency = 0.25;  // trapezoid drift per unit of |h| max|x'| accepted in continuation
constexpr double kDipContrast = 1e-1;  // same, relative to the maximum over the 3 neighbours on each side

double radius(const OrbitMap& map, const Vec& c) {
  const double n = map.norm_square(c);
  return n > 0.0 ? std::sqrt(n) : 0.0;
}

// Newton iteration on sigma(u) = c / r^d with u = x / r; returns the
// normalized residual.
double newton_normalized(const OrbitMap& map, const Vec& c, Vec& x, double tol, int max_iterations) {
  const double r = radius(map, c);
  if (r == 0.0) {
    x = Vec::Zero(map.input_dim());
    return c.cwiseAbs().maxCoeff();
  }
  const Vec goal = map.scale(c, r);
  Vec u = x / r;
  if (!u.allFinite() || u.norm() < 1e-12) u = Vec::Unit(map.input_dim(), 0);
  Vec f = map.eval(u) - goal;
  double res = f.cwiseAbs().maxCoeff();
  for (int it = 0; it < max_iterations && res > tol; ++it) {
    const Eigen::MatrixXd jac = map.jacobian(u);
    const Vec step = jac.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(f);
    bool improved = false;
    double alpha = 1.0;
    for (int ls = 0; ls < 12; ++ls, alpha *= 0.5) {
      const Vec trial = u - alpha * step;
      const Vec ft = map.eval(trial) - goal;
      const double rt = ft.cwiseAbs().maxCoeff();
      if (rt < res) {
        u = trial;
        f = ft;
        res = rt;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  // Polish with equilibrated rows so that tiny high-degree components are
  // matched to relative precision.
  Vec w = Vec::Ones(f.size());
  {
    const Eigen::MatrixXd jac = map.jacobian(u);
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = 1.0 / std::max(jac.row(i).norm(), 1e-200);
  }
  double wres = w.cwiseProduct(f).cwiseAbs().maxCoeff();
  for (int it = 0; it < 8 && wres > 0.0; ++it) {
    Eigen::MatrixXd jac = map.jacobian(u);
    jac = w.asDiagonal() * jac;
    const Vec step = jac.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(w.cwiseProduct(f));
    const Vec trial = u - step;
    const Vec ft = map.eval(trial) - goal;
    const double wt = w.cwiseProduct(ft).cwiseAbs().maxCoeff();
    if (!(wt < wres)) break;
    u = trial;
    f = ft;
    wres = wt;
    res = f.cwiseAbs().maxCoeff();
  }
  x = r * u;
  return res;
}

double normalized_residual(const OrbitMap& map, const Vec& c, const Vec& x) {
  const double r = radius(map, c);
  if (r == 0.0) return std::max(c.cwiseAbs().maxCoeff(), x.cwiseAbs().maxCoeff());
  return (map.eval(x / r) - map.scale(c, r)).cwiseAbs().maxCoeff();
}

// First-order distance from x / r to the normalized fiber: each residual
// component divided by the norm of its gradient.
double fiber_distance(const OrbitMap& map, const Vec& c, const Vec& x) {
  const double r = radius(map, c);
  if (r == 0.0) return x.norm();
  const Vec u = x / r;
  const Vec f = map.eval(u) - map.scale(c, r);
  const Eigen::MatrixXd jac = map.jacobian(u);
  double d = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double g = jac.row(i).norm();
    if (g == 0.0) {
      if (std::abs(f(i)) > 1e-15) return std::numeric_limits<double>::infinity();
      continue;
    }
    d = std::max(d, std::abs(f(i)) / g);
  }
  return d;
}

double regularity(const OrbitMap& map, const Vec& x) {
  const double r = x.norm();
  if (!(r > 0.0)) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(map.jacobian(x / r));
  const Vec s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0.0;
  if (s.size() < x.size()) return 0.0;
  return s(s.size() - 1) / s(0);
}

bool lex_greater(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double ra = std::round(a(i) * 1e9);
    const double rb = std::round(b(i) * 1e9);
    if (ra != rb) return ra > rb;
  }
  return false;
}

Vec canonical_in_orbit(const FiniteGroup& group, const Vec& x) {
  Vec best = x;
  for (const auto& g : group.elements()) {
    const Vec y = g * x;
    if (lex_greater(y, best)) best = y;
  }
  return best;
}

Vec nonuniform_derivative(const std::vector<double>& t, const std::vector<Vec>& x, std::size_t i) {
  const std::size_t n = t.size();
  if (n < 2) return Vec::Zero(x[i].size());
  if (i == 0) return (x[1] - x[0]) / (t[1] - t[0]);
  if (i == n - 1) return (x[n - 1] - x[n - 2]) / (t[n - 1] - t[n - 2]);
  const double h0 = t[i] - t[i - 1];
  const double h1 = t[i + 1] - t[i];
  return (-h1 / (h0 * (h0 + h1))) * x[i - 1] + ((h1 - h0) / (h0 * h1)) * x[i] + (h0 / (h1 * (h0 + h1))) * x[i + 1];
}

// d/dt N(c(t)) for a polynomial N in the invariants
double directional(const Poly<double>& p, const Vec& c, const Vec& dc) {
  double out = 0.0;
  for (const auto& [e, coef] : p.terms()) {
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (e[j] == 0) continue;
      double v = coef * e[j] * std::pow(c(static_cast<Eigen::Index>(j)), e[j] - 1) * dc(static_cast<Eigen::Index>(j));
      for (std::size_t l = 0; l < e.size(); ++l)
        if (l != j) v *= std::pow(c(static_cast<Eigen::Index>(l)), e[l]);
      out += v;
    }
  }
  return out;
}

// Sequential pointwise lift with sheet selection by linear prediction.
LocalLift lift_pointwise(const FiniteGroup& group, const OrbitMap& map, const Curve& curve,
                         const std::vector<double>& times, const LiftOptions& options, const std::string& kind) {
  LocalLift out;
  out.kind = kind;
  out.times = times;
  std::vector<bool> at_zero(times.size(), false);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Vec c = curve.value(times[i]);
    const double r = radius(map, c);
    Vec x;
    if (r == 0.0 || r * r <= options.zero_tol * std::max(1.0, c.cwiseAbs().maxCoeff())) {
      x = Vec::Zero(map.input_dim());
      at_zero[i] = true;
    } else if (i == 0) {
      x = find_preimage(group, map, c, options);
    } else {
      Vec pred = out.points[i - 1];
      if (i >= 2)
        pred += (out.points[i - 1] - out.points[i - 2]) * (times[i] - times[i - 1]) / (times[i - 1] - times[i - 2]);
      x = pred.norm() > 0.0 ? pred : Vec(Vec::Unit(map.input_dim(), 0) * r);
      if (newton_normalized(map, c, x, options.newton_tol, 60) > kAccept) x = find_preimage(group, map, c, options);
      x = group.element(nearest_in_orbit(group, x, pred)) * x;
    }
    out.points.push_back(x);
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (at_zero[i] || out.points[i].norm() == 0.0)
      out.derivatives.push_back(nonuniform_derivative(times, out.points, i));
    else
      out.derivatives.push_back(lift_velocity(map, out.points[i], curve.derivative(times[i])));
  }
  return out;
}

struct ZeroEvent {
  double t = 0.0;
  bool zone = false;
  double end = 0.0;  // zone end
};

// Zeros of c on and between grid points, merged into zones when closer than 3h.
// A zero sample is c_1 <= zero_tol * max(1, max c_1); isolated zero samples
// and small local minima are refined to the minimiser of c_1.
std::vector<ZeroEvent> detect_zeros(const OrbitMap& map, const Curve& curve, const std::vector<double>& grid,
                                    const LiftOptions& options) {
  const std::size_t n = grid.size();
  std::vector<double> c1(n);
  double c1_max = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    c1[i] = map.norm_square(curve.value(grid[i]));
    c1_max = std::max(c1_max, c1[i]);
  }
  const double threshold = options.zero_tol * c1_max;
  auto c1_of = [&](double t) { return map.norm_square(curve.value(t)); };
  auto dc1_of = [&](double t) {
    Vec c, dc;
    curve.evaluate(t, &c, &dc);
    return directional(map.norm_expression(), c, dc);
  };
  auto is_zero = [&](std::size_t i) { return c1[i] <= threshold; };
  std::vector<double> zeros;
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_zero = i > 0 && is_zero(i - 1);
    const bool right_zero = i + 1 < n && is_zero(i + 1);
    if (is_zero(i) && (left_zero || right_zero)) {
      zeros.push_back(grid[i]);  // part of a run
      continue;
    }
    const bool local_min = (i == 0 || c1[i] <= c1[i - 1]) && (i + 1 == n || c1[i] <= c1[i + 1]);
    if (!is_zero(i) && !local_min) continue;
    const double a = grid[i > 0 ? i - 1 : 0];
    const double b = grid[i + 1 < n ? i + 1 : n - 1];
    double tz = grid[i];
    const double fa = dc1_of(a), fb = dc1_of(b);
    if (fa < 0.0 && fb > 0.0) {
      std::uintmax_t iters = 200;
      auto bracket = boost::math::tools::toms748_solve(dc1_of, a, b, fa, fb,
                                                       boost::math::tools::eps_tolerance<double>(52), iters);
      tz = 0.5 * (bracket.first + bracket.second);
    } else if (b > a) {
      tz = boost::math::tools::brent_find_minima(c1_of, a, b, 52).first;
    }
    if (c1_of(tz) <= threshold) zeros.push_back(tz);
    else if (is_zero(i)) zeros.push_back(grid[i]);
  }
  std::sort(zeros.begin(), zeros.end());
  zeros.erase(std::unique(zeros.begin(), zeros.end(), [](double x, double y) { return std::abs(x - y) <= 1e-12; }),
              zeros.end());
  double h = 0.0;
  for (std::size_t i = 1; i < n; ++i) h = std::max(h, grid[i] - grid[i - 1]);
  std::vector<ZeroEvent> events;
  for (std::size_t i = 0; i < zeros.size();) {
    std::size_t j = i;
    while (j + 1 < zeros.size() && zeros[j + 1] - zeros[j] < 3.0 * h) ++j;
    ZeroEvent e;
    e.t = zeros[i];
    e.end = zeros[j];
    e.zone = j > i;
    events.push_back(e);
    i = j + 1;
  }
  return events;
}

LiftResult glue_sequence(const FiniteGroup& group, const OrbitMap& map, const std::vector<LocalLift>& locals,
                         const LiftOptions& options);

LiftResult lift_impl(const FiniteGroup& group, const OrbitMap& map, const Curve& curve,
                     const std::vector<double>& grid, const LiftOptions& options, int depth,
                     std::vector<ZeroEvent>* events_out, std::vector<std::string>* warnings) {
  if (depth > options.max_depth) fail(ErrorKind::recursion_depth_exceeded, "zeros nest beyond the depth limit");
  const std::size_t n = grid.size();
  const auto events = detect_zeros(map, curve, grid, options);
  if (events_out) *events_out = events;
  double h = 0.0;
  for (std::size_t i = 1; i < n; ++i) h = std::max(h, grid[i] - grid[i - 1]);

  struct Window {
    std::size_t first, last;  // inclusive grid range
    std::size_t event;
  };
  std::vector<Window> windows;
  for (std::size_t e = 0; e < events.size(); ++e) {
    const auto& ev = events[e];
    double lo, hi;
    if (ev.zone) {
      lo = ev.t - 2.0 * h;
      hi = ev.end + 2.0 * h;
    } else {
      double w = 6.0 * h;
      if (e > 0) w = std::min(w, 0.4 * (ev.t - events[e - 1].end));
      if (e + 1 < events.size()) w = std::min(w, 0.4 * (events[e + 1].t - ev.t));
      lo = ev.t - w;
      hi = ev.t + w;
    }
    std::size_t first = n, last = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (grid[i] >= lo - 1e-12 * h && grid[i] <= hi + 1e-12 * h) {
        first = std::min(first, i);
        last = i;
      }
    if (first == n) {
      // no grid point inside: take the nearest one
      std::size_t best = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (std::abs(grid[i] - ev.t) < std::abs(grid[best] - ev.t)) best = i;
      first = last = best;
    }
    windows.push_back({first, last, e});
  }

  std::vector<LocalLift> locals;
  auto slice = [&](std::size_t a, std::size_t b) { return std::vector<double>(grid.begin() + a, grid.begin() + b + 1); };
  auto continuation = [&](const std::vector<double>& times) {
    // seed at the most regular of a few candidates
    const std::size_t stride = std::max<std::size_t>(1, times.size() / 8);
    std::size_t best = 0;
    double best_score = -1.0;
    Vec best_x;
    for (std::size_t j = 0; j < times.size(); j += stride) {
      const Vec c = curve.value(times[j]);
      if (radius(map, c) == 0.0) continue;
      const Vec x = find_preimage(group, map, c, options);
      const double s = regularity(map, x);
      if (s > best_score * (1.0 + 1e-9)) {
        best_score = s;
        best = j;
        best_x = x;
      }
    }
    if (best_score < 0.0) return lift_pointwise(group, map, curve, times, options, "pointwise");
    try {
      std::vector<double> fwd(times.begin() + static_cast<std::ptrdiff_t>(best), times.end());
      std::vector<double> bwd(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(best) + 1);
      std::reverse(bwd.begin(), bwd.end());
      LocalLift right = lift_regular(group, map, curve, fwd, best_x, options);
      LocalLift left = lift_regular(group, map, curve, bwd, best_x, options);
      LocalLift out;
      out.kind = "regular";
      for (std::size_t j = left.times.size(); j-- > 1;) {
        out.times.push_back(left.times[j]);
        out.points.push_back(left.points[j]);
        out.derivatives.push_back(left.derivatives[j]);
      }
      out.times.insert(out.times.end(), right.times.begin(), right.times.end());
      out.points.insert(out.points.end(), right.points.begin(), right.points.end());
      out.derivatives.insert(out.derivatives.end(), right.derivatives.begin(), right.derivatives.end());
      return out;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::newton_diverged) throw;
      if (warnings) warnings->push_back(std::string("continuation fell back to pointwise solves: ") + err.what());
      return lift_pointwise(group, map, curve, times, options, "pointwise");
    }
  };
  // Continuation through the segment, split where it passes close to a
  // singular stratum; the pieces are seeded independently and glued.
  auto regular_segment = [&](std::size_t a, std::size_t b) {
    const auto times = slice(a, b);
    LocalLift whole = continuation(times);
    std::vector<LocalLift> out;
    if (whole.kind != "regular" || times.size() < 7) {
      out.push_back(std::move(whole));
      return out;
    }
    std::vector<double> reg(times.size());
    double top = 0.0;
    for (std::size_t j = 0; j < times.size(); ++j) top = std::max(top, reg[j] = regularity(map, whole.points[j]));
    std::vector<std::size_t> cuts;
    for (std::size_t j = 3; j + 3 < times.size(); ++j) {
      const double near = *std::max_element(reg.begin() + static_cast<std::ptrdiff_t>(j - 3),
                                            reg.begin() + static_cast<std::ptrdiff_t>(j + 4));
      const bool dip = reg[j] < kSingularDip * top || reg[j] < kDipContrast * near;
      if (dip && reg[j] <= reg[j - 1] && reg[j] < reg[j + 1] && (cuts.empty() || j >= cuts.back() + 6))
        cuts.push_back(j);
    }
    if (cuts.empty()) {
      out.push_back(std::move(whole));
      return out;
    }
    std::size_t start = 0;
    for (std::size_t k = 0; k <= cuts.size(); ++k) {
      const std::size_t stop = k < cuts.size() ? cuts[k] + 2 : times.size() - 1;
      out.push_back(continuation(std::vector<double>(times.begin() + static_cast<std::ptrdiff_t>(start),
                                                     times.begin() + static_cast<std::ptrdiff_t>(stop) + 1)));
      if (k < cuts.size()) start = cuts[k] - 2;
    }
    return out;
  };
  auto push_all = [&](std::vector<LocalLift> pieces) {
    for (auto& p : pieces) locals.push_back(std::move(p));
  };

  if (windows.empty()) {
    push_all(regular_segment(0, n - 1));
  } else {
    auto window_lift = [&](const Window& w) {
      const auto times = slice(w.first, w.last);
      const auto& ev = events[w.event];
      if (ev.zone) return lift_pointwise(group, map, curve, times, options, "flat");
      return lift_through_zero(group, map, curve, ev.t, times, options, depth);
    };
    // regular piece before the first window
    if (windows.front().first > 0) {
      const std::size_t b = std::min(windows.front().first + 1, windows.front().last);
      push_all(regular_segment(0, b));
    }
    for (std::size_t k = 0; k < windows.size(); ++k) {
      locals.push_back(window_lift(windows[k]));
      const std::size_t a = windows[k].last > windows[k].first ? windows[k].last - 1 : windows[k].last;
      std::size_t b;
      if (k + 1 < windows.size()) {
        b = windows[k + 1].first < windows[k + 1].last ? windows[k + 1].first + 1 : windows[k + 1].first;
      } else {
        if (windows[k].last == n - 1) continue;
        b = n - 1;
      }
      if (b > a) push_all(regular_segment(a, b));
    }
  }
  return glue_sequence(group, map, locals, options);
}

Vec transform(const FiniteGroup& group, std::size_t g, const Vec& x) { return group.element(g) * x; }

LiftResult glue_sequence(const FiniteGroup& group, const OrbitMap& map, const std::vector<LocalLift>& locals,
                         const LiftOptions& options) {
  LiftResult out;
  if (locals.empty()) return out;
  out.grid = locals[0].times;
  out.points = locals[0].points;
  out.derivatives = locals[0].derivatives;
  for (std::size_t k = 1; k < locals.size(); ++k) {
    const LocalLift& b = locals[k];
    // overlap points ordered by regularity of the accumulated lift
    std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> overlap;
    for (std::size_t j = 0; j < b.times.size(); ++j) {
      auto it = std::find(out.grid.begin(), out.grid.end(), b.times[j]);
      if (it == out.grid.end()) continue;
      const auto ia = static_cast<std::size_t>(it - out.grid.begin());
      overlap.push_back({regularity(map, out.points[ia]), {ia, j}});
    }
    if (overlap.empty()) fail(ErrorKind::no_overlap, "local lifts do not overlap");
    std::stable_sort(overlap.begin(), overlap.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    std::optional<DerivativeMatch> match;
    std::size_t ia = 0, ib = 0;
    std::string last_error;
    for (const auto& [score, idx] : overlap) {
      try {
        match = match_derivative(group, out.points[idx.first], out.derivatives[idx.first], b.points[idx.second],
                                 b.derivatives[idx.second], options.match_tol);
        ia = idx.first;
        ib = idx.second;
        break;
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::no_match) throw;
        last_error = err.what();
      }
    }
    if (!match) fail(ErrorKind::no_match, "no junction matches: " + last_error);
    out.glue_log.push_back({out.grid[ia], match->combined});
    out.grid.resize(ia + 1);
    out.points.resize(ia + 1);
    out.derivatives.resize(ia + 1);
    for (std::size_t j = ib + 1; j < b.times.size(); ++j) {
      out.grid.push_back(b.times[j]);
      out.points.push_back(transform(group, match->combined, b.points[j]));
      out.derivatives.push_back(transform(group, match->combined, b.derivatives[j]));
    }
  }
  return out;
}

}  // namespace

double curve_scale(const Curve& c, const std::vector<double>& grid) {
  double s = 1.0;
  for (double t : grid) s = std::max(s, c.value(t).cwiseAbs().maxCoeff());
  return s;
}

Curve forward_curve(const OrbitMap& map, const Curve& path) {
  auto eval = [map, path](double t, Vec* value, Vec* derivative) {
    Vec g, dg;
    path.evaluate(t, &g, derivative ? &dg : nullptr);
    if (value) *value = map.eval(g);
    if (derivative) *derivative = map.jacobian(g) * dg;
  };
  return Curve(map.output_dim(), path.start(), path.end(), eval, path.smoothness());
}

Eigen::VectorXd find_preimage(const FiniteGroup& group, const OrbitMap& map, const Eigen::VectorXd& c,
                              const LiftOptions& options) {
  const int m = map.input_dim();
  const double r = radius(map, c);
  if (r == 0.0) return Vec::Zero(m);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  Vec best;
  double best_res = std::numeric_limits<double>::infinity();
  double best_dist = std::numeric_limits<double>::infinity();
  for (int s = 0; s < std::max(1, options.multistart); ++s) {
    Vec start(m);
    for (int i = 0; i < m; ++i) start(i) = normal(rng);
    start *= r / std::max(start.norm(), 1e-12);
    FiberSolution sol = solve_fiber(map, c, start, {200, 1e-15});
    Vec x = sol.x;
    const double res = newton_normalized(map, c, x, 1e-15, 20);
    // among acceptable candidates prefer the one closest to the fiber
    const double dist = fiber_distance(map, c, x);
    const bool ok = res <= 1e-7, best_ok = best_res <= 1e-7;
    if ((ok && (!best_ok || dist < best_dist)) || (!ok && !best_ok && res < best_res)) {
      best_res = res;
      best_dist = dist;
      best = x;
    }
    if (best_res <= 1e-12 && best_dist <= 1e-9) break;
  }
  if (best_res > 1e-7) fail(ErrorKind::not_in_image, "no preimage found, residual " + format_double(best_res));
  return canonical_in_orbit(group, best);
}

std::size_t nearest_in_orbit(const FiniteGroup& group, const Eigen::VectorXd& x, const Eigen::VectorXd& target) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < group.order(); ++g) {
    const double d = (group.element(g) * x - target).squaredNorm();
    if (d < best_d * (1.0 - 1e-12)) {
      best_d = d;
      best = g;
    }
  }
  return best;
}

Eigen::VectorXd lift_velocity(const OrbitMap& map, const Eigen::VectorXd& x, const Eigen::VectorXd& dc) {
  const double r = x.norm();
  if (!(r > 0.0)) return Vec::Zero(x.size());
  Vec rhs(dc.size());
  Eigen::MatrixXd jac = map.jacobian(x / r);
  for (Eigen::Index i = 0; i < dc.size(); ++i) {
    rhs(i) = dc(i) / std::pow(r, map.degrees()[i] - 1);
    // row equilibration: high-degree rows are tiny near singular strata
    const double w = jac.row(i).norm();
    if (w > 0.0) {
      jac.row(i) /= w;
      rhs(i) /= w;
    }
  }
  return jac.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
}

LocalLift lift_regular(const FiniteGroup& group, const OrbitMap& map, const Curve& curve,
                       const std::vector<double>& times, const Eigen::VectorXd& seed, const LiftOptions& options) {
  LocalLift out;
  out.kind = "regular";
  if (times.empty()) return out;
  const Vec c0 = curve.value(times[0]);
  if (seed.size() != map.input_dim() || normalized_residual(map, c0, seed) > 1e-6)
    fail(ErrorKind::seed_mismatch, "seed does not lie over c(t0)");
  Vec x = seed;
  newton_normalized(map, c0, x, options.newton_tol, 40);
  x = group.element(nearest_in_orbit(group, x, seed)) * x;
  Vec dx = lift_velocity(map, x, curve.derivative(times[0]));
  out.times.push_back(times[0]);
  out.points.push_back(x);
  out.derivatives.push_back(dx);

  std::function<void(double, double, int)> advance = [&](double tp, double tn, int depth) {
    const Vec pred = x + (tn - tp) * dx;
    const Vec c = curve.value(tn);
    Vec y = pred;
    const double res = newton_normalized(map, c, y, options.newton_tol, 40);
    const bool on_fiber = fiber_distance(map, c, y) <= kFiberTol;
    if (!(res <= std::max(options.newton_tol, kAccept)) || (!on_fiber && depth < options.max_bisections)) {
      if (depth >= options.max_bisections)
        fail(ErrorKind::newton_diverged, "continuation stalls near t = " + format_double(tn));
      const double tm = 0.5 * (tp + tn);
      advance(tp, tm, depth + 1);
      advance(tm, tn, depth + 1);
      return;
    }
    y = group.element(nearest_in_orbit(group, y, pred)) * y;
    const Vec dy = radius(map, c) > 0.0 ? lift_velocity(map, y, curve.derivative(tn)) : dx;
    // trapezoid consistency: a step that lands on a reflected sheet near a
    // singular stratum disagrees with the endpoint velocities
    const double h = tn - tp;
    const double drift = (y - x - 0.5 * h * (dx + dy)).norm();
    if (depth < options.max_bisections && drift > kStepConsistency * std::abs(h) * std::max(dx.norm(), dy.norm()) + 1e-12 * (1.0 + x.norm())) {
      const double tm = 0.5 * (tp + tn);
      advance(tp, tm, depth + 1);
      advance(tm, tn, depth + 1);
      return;
    }
    x = y;
    dx = dy;
  };
  for (std::size_t i = 1; i < times.size(); ++i) {
    advance(times[i - 1], times[i], 0);
    out.times.push_back(times[i]);
    out.points.push_back(x);
    out.derivatives.push_back(dx);
  }
  return out;
}

SliceProblem slice_reduce(const FiniteGroup& group, const OrbitMap& map, const Curve& curve, double t0,
                          const Eigen::VectorXd& v, double window, const LiftOptions& options) {
  const Vec c0 = curve.value(t0);
  if (normalized_residual(map, c0, v) > 1e-6) fail(ErrorKind::seed_mismatch, "sigma(v) differs from c(t0)");
  const IsotropyData iso = isotropy(group, v, 1e-7 * std::max(1.0, v.norm()));
  SliceProblem out;
  out.stabilizer = group.subgroup(iso.stabilizer, group.name() + "_v");
  InvariantOptions inv;
  inv.cap = map.system().d();
  inv.seed = options.seed;
  out.system = generate_invariants(out.stabilizer, inv).numeric;
  out.offset = v;
  const OrbitMap reduced(out.system);
  const FiniteGroup& g = group;
  const OrbitMap m = map;
  const Curve base = curve;
  auto f = [g, m, base, v, reduced](double t) {
    const Vec c = base.value(t);
    Vec x = v;
    if (newton_normalized(m, c, x, 1e-14, 60) > 1e-9) {
      FiberSolution sol = solve_fiber(m, c, v, {200, 1e-15});
      x = sol.x;
    }
    x = g.element(nearest_in_orbit(g, x, v)) * x;
    return reduced.eval(x - v);
  };
  const double a = std::max(curve.start(), t0 - window);
  const double b = std::min(curve.end(), t0 + window);
  out.curve = Curve::from_function(reduced.output_dim(), a, b, f, curve.smoothness(), 1e-5);
  return out;
}

LocalLift lift_through_zero(const FiniteGroup& group, const OrbitMap& map, const Curve& curve, double t0,
                            const std::vector<double>& times, const LiftOptions& options, int depth) {
  if (depth > options.max_depth) fail(ErrorKind::recursion_depth_exceeded, "zeros nest beyond the depth limit");
  double reach = 0.0;
  for (double t : times) reach = std::max(reach, std::abs(t - t0));
  const double window = std::min(0.1, std::max(reach, 4.0 * options.fill_radius));
  auto c1 = [&](double t) { return map.norm_square(curve.value(t)); };
  const int max_degree = map.system().d();
  const MultiplicityResult mult = multiplicity(c1, t0, 2 * max_degree + 2, window);
  if (mult.flat) return lift_pointwise(group, map, curve, times, options, "flat");

  DesingularizeOptions dopt;
  dopt.zero_tol = std::sqrt(options.zero_tol);
  dopt.fill_radius = options.fill_radius;
  dopt.window = window;
  const OrbitMap m = map;
  dopt.in_image = [m](const Vec& c) {
    if (radius(m, c) == 0.0) return c.cwiseAbs().maxCoeff() <= 1e-9;
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal;
    for (int s = 0; s < 16; ++s) {
      Vec start(m.input_dim());
      for (Eigen::Index i = 0; i < start.size(); ++i) start(i) = normal(rng);
      const FiberSolution sol = solve_fiber(m, c, start, {200, 1e-14});
      if (sol.residual <= 1e-7) return true;
    }
    return false;
  };
  const Curve residual = desingularize(curve, t0, map.degrees(), [&](const Vec& c) { return map.norm_square(c); }, dopt);
  const LiftResult inner = lift_impl(group, map, residual, times, options, depth + 1, nullptr, nullptr);
  LocalLift out;
  out.kind = "zero";
  out.times = inner.grid;
  for (std::size_t i = 0; i < inner.grid.size(); ++i) {
    const double s = inner.grid[i] - t0;
    out.points.push_back(s * inner.points[i]);
    out.derivatives.push_back(inner.points[i] + s * inner.derivatives[i]);
  }
  return out;
}

DerivativeMatch match_derivative(const FiniteGroup& group, const Eigen::VectorXd& a, const Eigen::VectorXd& da,
                                 const Eigen::VectorXd& b, const Eigen::VectorXd& db, double tol) {
  const double vtol = tol * std::max(1.0, a.norm());
  const double dtol = tol * std::max(1.0, da.norm());
  std::vector<std::size_t> stabilizer;
  for (std::size_t h = 0; h < group.order(); ++h)
    if ((group.element(h) * a - a).norm() <= vtol) stabilizer.push_back(h);
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < group.order(); ++g) {
    const Vec gb = group.element(g) * b;
    if ((a - gb).norm() > vtol) continue;
    const Vec gdb = group.element(g) * db;
    for (std::size_t h : stabilizer) {
      const double d = (da - group.element(h) * gdb).norm();
      closest = std::min(closest, d);
      if (d <= dtol) return {h, g, group.product(h, g)};
    }
  }
  fail(ErrorKind::no_match, "no (h, g) matches the derivatives (closest " + format_double(closest) + ")");
}

LiftResult glue_lifts(const FiniteGroup& group, const OrbitMap& map, const std::vector<LocalLift>& locals,
                      const LiftOptions& options) {
  std::vector<LocalLift> sorted = locals;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const LocalLift& x, const LocalLift& y) { return x.times.front() < y.times.front(); });
  return glue_sequence(group, map, sorted, options);
}

std::vector<double> refine_grid(const std::vector<double>& grid, int level) {
  if (level <= 0 || grid.size() < 2) return grid;
  const int parts = 1 << level;
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    for (int p = 0; p < parts; ++p) out.push_back(grid[i] + (grid[i + 1] - grid[i]) * p / parts);
  out.push_back(grid.back());
  return out;
}

namespace {

double max_derivative_step(const LiftResult& r) {
  double m = 0.0;
  for (std::size_t i = 1; i < r.grid.size(); ++i) m = std::max(m, (r.derivatives[i] - r.derivatives[i - 1]).norm());
  return m;
}

double second_difference(const LiftResult& r, double t) {
  auto it = std::lower_bound(r.grid.begin(), r.grid.end(), t - 1e-12);
  if (it == r.grid.end() || it == r.grid.begin() || it + 1 == r.grid.end()) return 0.0;
  const auto i = static_cast<std::size_t>(it - r.grid.begin());
  const double h0 = r.grid[i] - r.grid[i - 1];
  const double h1 = r.grid[i + 1] - r.grid[i];
  const Vec d = 2.0 * (h0 * r.points[i + 1] - (h0 + h1) * r.points[i] + h1 * r.points[i - 1]) / (h0 * h1 * (h0 + h1));
  return d.norm();
}

}  // namespace

LiftResult lift_curve(const FiniteGroup& group, const OrbitMap& map, const Curve& curve,
                      const std::vector<double>& grid, const LiftOptions& options) {
  if (grid.size() < 2) fail(ErrorKind::invalid_argument, "grid needs at least two points");
  if (map.input_dim() != group.dimension()) fail(ErrorKind::invalid_argument, "system and group dimensions differ");
  if (curve.dim() != map.output_dim()) fail(ErrorKind::invalid_argument, "curve and orbit map dimensions differ");
  std::vector<ZeroEvent> events;
  std::vector<std::string> warnings;
  LiftResult result = lift_impl(group, map, curve, grid, options, 0, &events, &warnings);
  result.scale = curve_scale(curve, grid);
  auto& diag = result.diagnostics;
  diag.warnings = warnings;
  const int d = map.system().d();
  if (curve.smoothness() < d)
    diag.warnings.push_back("declared smoothness class is below the degree d = " + std::to_string(d));

  for (std::size_t i = 0; i < result.grid.size(); ++i) {
    const Vec c = curve.value(result.grid[i]);
    const double res = (map.eval(result.points[i]) - c).cwiseAbs().maxCoeff() / result.scale;
    result.residuals.push_back(res);
    diag.max_residual = std::max(diag.max_residual, res);
  }
  if (!(diag.max_residual <= options.residual_tol))
    fail(ErrorKind::inconsistent, "lift residual " + format_double(diag.max_residual) + " exceeds tolerance");

  // zero set
  auto& zs = result.zero_set;
  std::vector<double> cuts{grid.front()};
  for (const auto& ev : events) {
    if (ev.zone) {
      zs.flat_zones.push_back({ev.t, ev.end});
      // accumulation point estimate: zone centre
      const double centre = 0.5 * (ev.t + ev.end);
      zs.E.push_back(centre);
      auto it = std::min_element(result.grid.begin(), result.grid.end(),
                                 [&](double a, double b) { return std::abs(a - centre) < std::abs(b - centre); });
      const auto idx = static_cast<std::size_t>(it - result.grid.begin());
      if (result.derivatives[idx].norm() <= 1e-5 * std::max(1.0, result.scale)) zs.F_accumulation.push_back(centre);
      cuts.push_back(ev.t);
      cuts.push_back(ev.end);
    } else {
      zs.zeros.push_back(ev.t);
      const double window = std::min(0.1, 0.5 * (grid.back() - grid.front()));
      auto c1 = [&](double t) { return map.norm_square(curve.value(t)); };
      try {
        const auto mult = multiplicity(c1, ev.t, 2 * d + 2, window);
        if (mult.flat || mult.order > 2) zs.F_isolated.push_back(ev.t);
      } catch (const Error&) {
        diag.warnings.push_back("multiplicity test inconclusive at t = " + format_double(ev.t));
      }
      cuts.push_back(ev.t);
    }
  }
  cuts.push_back(grid.back());
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (!(cuts[k + 1] > cuts[k])) continue;
    CompactBound cb{cuts[k], cuts[k + 1], 0.0};
    for (std::size_t i = 1; i + 1 < result.grid.size(); ++i)
      if (result.grid[i] > cb.a && result.grid[i] < cb.b) cb.value = std::max(cb.value, result.derivatives[i].norm());
    diag.bounds.push_back(cb);
  }

  if (options.diagnostics && options.refinement_levels > 0) {
    const bool c1_class = curve.smoothness() >= options.k + d;
    const bool c2_class = curve.smoothness() >= options.k + 2 * d;
    if (c1_class || c2_class) {
      LiftOptions sub = options;
      sub.diagnostics = false;
      std::vector<LiftResult> levels{result};
      for (int l = 1; l < options.refinement_levels; ++l)
        levels.push_back(lift_impl(group, map, curve, refine_grid(grid, l), sub, 0, nullptr, nullptr));
      if (c1_class) {
        diag.modulus_emitted = true;
        diag.modulus_monotone = true;
        for (int l = 0; l < options.refinement_levels; ++l) {
          double h = 0.0;
          for (std::size_t i = 1; i < levels[l].grid.size(); ++i) h = std::max(h, levels[l].grid[i] - levels[l].grid[i - 1]);
          diag.modulus.push_back({l, h, max_derivative_step(levels[l])});
          if (l > 0 && !(diag.modulus[l].modulus < diag.modulus[l - 1].modulus || diag.modulus[l].modulus <= 1e-12))
            diag.modulus_monotone = false;
        }
      }
      if (c2_class) {
        diag.second_differences_emitted = true;
        diag.second_differences_bounded = true;
        for (const auto& glue : result.glue_log) {
          double prev = -1.0;
          for (int l = 0; l < options.refinement_levels; ++l) {
            double h = 0.0;
            for (std::size_t i = 1; i < levels[l].grid.size(); ++i)
              h = std::max(h, levels[l].grid[i] - levels[l].grid[i - 1]);
            const double v = second_difference(levels[l], glue.t);
            diag.second_differences.push_back({glue.t, l, h, v});
            if (prev >= 0.0 && v > 1.5 * prev + 1e-6 * (1.0 + prev)) diag.second_differences_bounded = false;
            prev = v;
          }
        }
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// reduction to root tracking

std::vector<Poly<double>> reduction_coefficients(const ReductionComponent& component, int nvars) {
  const int k = component.k;
  std::vector<Poly<double>> e(static_cast<std::size_t>(k) + 1, Poly<double>(nvars));
  e[0] = Poly<double>::constant(nvars, 1.0);
  std::vector<double> ref(static_cast<std::size_t>(k) + 1, 0.0);
  ref[0] = 1.0;
  for (Eigen::Index row = 0; row < component.functionals.rows(); ++row) {
    Poly<double> f(nvars);
    for (int j = 0; j < nvars; ++j) {
      const double a = component.functionals(row, j);
      if (a != 0.0) f = f + Poly<double>::variable(nvars, j) * a;
    }
    const double size = component.functionals.row(row).cwiseAbs().sum();
    for (int j = k; j >= 1; --j) {
      e[j] = e[j] + f * e[j - 1];
      ref[j] += size * ref[j - 1];
    }
  }
  // cancellation leaves terms at rounding level of the elementary symmetric sizes
  std::vector<Poly<double>> out;
  for (int j = 1; j <= k; ++j) {
    Poly<double> p(nvars);
    for (const auto& [m, c] : e[j].terms())
      if (std::abs(c) > 1e-12 * ref[j]) p.add_term(m, c);
    out.push_back(p);
  }
  return out;
}

ReductionPlan build_reduction(const FiniteGroup& group, const Decomposition& decomposition,
                              const GeneratorSystem<double>& system, std::uint64_t seed) {
  ReductionPlan plan;
  const auto isos = max_isotropy_per_component(group, decomposition, seed);
  const int m = group.dimension();
  for (std::size_t i = 0; i < isos.size(); ++i) {
    ReductionComponent comp;
    comp.basis = decomposition.components[i];
    comp.base_point = isos[i].base_point;
    std::vector<Vec> rows;
    for (std::size_t g = 0; g < group.order(); ++g) {
      const Vec row = group.element(g).transpose() * comp.base_point;
      bool seen = false;
      for (const auto& r : rows)
        if ((r - row).norm() <= 1e-9) seen = true;
      if (seen) continue;
      rows.push_back(row);
      comp.cosets.push_back(g);
    }
    comp.k = static_cast<int>(rows.size());
    if (static_cast<std::size_t>(comp.k) != isos[i].index)
      fail(ErrorKind::certification_failed, "functional count differs from the isotropy index");
    comp.functionals.resize(comp.k, m);
    for (int r = 0; r < comp.k; ++r) comp.functionals.row(r) = rows[static_cast<std::size_t>(r)].transpose();
    for (const auto& a : reduction_coefficients(comp, m)) comp.expressions.push_back(express_in_generators(a, system));
    plan.components.push_back(std::move(comp));
  }
  plan.k = compute_k(group, decomposition, system.d(), seed);
  return plan;
}

ReductionReport reduction_check(const ReductionPlan& plan, const OrbitMap& map, const Curve& curve,
                                const LiftResult& lift, double tol) {
  (void)map;
  ReductionReport report;
  double lift_speed = 0.0;
  for (std::size_t i = 1; i + 1 < lift.grid.size(); ++i) lift_speed = std::max(lift_speed, lift.derivatives[i].norm());
  for (const auto& comp : plan.components) {
    ReductionComponentReport cr;
    std::vector<HyperbolicCoefficients> samples;
    for (double t : lift.grid) {
      const Vec c = curve.value(t);
      HyperbolicCoefficients a(comp.k);
      for (int j = 0; j < comp.k; ++j) a(j) = comp.expressions[static_cast<std::size_t>(j)].evaluate(c);
      samples.push_back(a);
    }
    const RootTrack track = track_roots_sampled(lift.grid, samples);
    for (std::size_t i = 0; i < lift.grid.size(); ++i) {
      Vec f = comp.functionals * lift.points[i];
      std::vector<double> fv(f.data(), f.data() + f.size());
      std::vector<double> rv(track.roots[i].data(), track.roots[i].data() + track.roots[i].size());
      std::sort(fv.begin(), fv.end());
      std::sort(rv.begin(), rv.end());
      const double s = std::max(1.0, f.cwiseAbs().maxCoeff());
      for (std::size_t j = 0; j < fv.size(); ++j) {
        const double mis = std::abs(fv[j] - rv[j]) / s;
        if (mis > cr.max_mismatch) cr.max_mismatch = mis;
        if (mis > report.max_mismatch) {
          report.max_mismatch = mis;
          report.worst_time = lift.grid[i];
        }
      }
    }
    cr.track_bound = derivative_bound(track, lift.grid.front(), lift.grid.back()).value;
    cr.lift_bound = comp.base_point.norm() * lift_speed;
    report.components.push_back(cr);
  }
  report.passed = report.max_mismatch <= tol;
  return report;
}

}  // namespace orbitlift
