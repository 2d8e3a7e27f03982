#include "orbitlift/polar.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "orbitlift/error.hpp"
#include "orbitlift/orbit_map.hpp"

namespace orbitlift {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Residual (I - S S^T) g0 exp(theta . L) x, padded to at least as many
// entries as parameters.
struct SectionDistance {
  using Scalar = double;
  using InputType = Vec;
  using ValueType = Vec;
  using JacobianType = Mat;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const GroupSampler* ambient;
  Mat g0;
  Mat projector;
  Vec x;

  int inputs() const { return static_cast<int>(ambient->algebra.size()); }
  int values() const { return std::max(static_cast<int>(x.size()), inputs()); }

  int operator()(const Vec& theta, Vec& out) const {
    out = Vec::Zero(values());
    out.head(x.size()) = projector * (g0 * ambient->exp(theta) * x);
    return 0;
  }
};

struct Closest {
  Mat g;
  double distance = 0.0;
};

// Group element bringing x closest to the section.
Closest closest_to_section(const GroupSampler& ambient, const Mat& section, const Vec& x, std::mt19937_64& rng,
                           int starts) {
  const Mat projector = Mat::Identity(x.size(), x.size()) - section * section.transpose();
  Closest best{Mat::Identity(x.size(), x.size()), (projector * x).norm()};
  if (ambient.finite()) {
    for (const auto& g : ambient.elements) {
      const double d = (projector * (g * x)).norm();
      if (d < best.distance) best = {g, d};
    }
    return best;
  }
  for (int s = 0; s < starts; ++s) {
    SectionDistance f{&ambient, ambient.sample(rng), projector, x};
    Eigen::NumericalDiff<SectionDistance> nd(f);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<SectionDistance>> lm(nd);
    lm.parameters.xtol = 1e-15;
    lm.parameters.ftol = 1e-15;
    Vec theta = Vec::Zero(f.inputs());
    lm.minimize(theta);
    const Mat g = f.g0 * ambient.exp(theta);
    const double d = (projector * (g * x)).norm();
    if (d < best.distance) best = {g, d};
    if (best.distance <= 1e-13 * std::max(1.0, x.norm())) break;
  }
  return best;
}

Vec random_in_section(const Mat& section, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vec u(section.cols());
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = normal(rng);
  return section * (u / u.norm());
}

bool orthonormal_columns(const Mat& b) {
  return (b.transpose() * b - Mat::Identity(b.cols(), b.cols())).cwiseAbs().maxCoeff() <= 1e-9;
}

}  // namespace

Eigen::MatrixXd GroupSampler::sample(std::mt19937_64& rng) const {
  if (finite()) {
    std::uniform_int_distribution<std::size_t> pick(0, elements.size() - 1);
    return elements[pick(rng)];
  }
  std::normal_distribution<double> normal;
  Mat a(dimension, dimension);
  for (int i = 0; i < dimension; ++i)
    for (int j = 0; j < dimension; ++j) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR();
  for (int i = 0; i < dimension; ++i)
    if (r(i, i) < 0) q.col(i) *= -1.0;
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

Eigen::MatrixXd GroupSampler::exp(const Eigen::VectorXd& theta) const {
  Mat a = Mat::Zero(dimension, dimension);
  for (std::size_t i = 0; i < algebra.size(); ++i) a += theta(static_cast<Eigen::Index>(i)) * algebra[i];
  return a.exp();
}

GroupSampler so_sampler(int n) {
  if (n < 2) fail(ErrorKind::bad_params, "rotation family needs n >= 2");
  GroupSampler s;
  s.family = "so" + std::to_string(n);
  s.dimension = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Mat l = Mat::Zero(n, n);
      l(i, j) = -1.0;
      l(j, i) = 1.0;
      s.algebra.push_back(l);
    }
  return s;
}

GroupSampler finite_sampler(const FiniteGroup& group) {
  GroupSampler s;
  s.family = "finite";
  s.dimension = group.dimension();
  s.elements = group.elements();
  return s;
}

GroupSampler parse_sampler(const std::string& ambient) {
  const std::string prefix = "sampler:so";
  if (ambient.rfind(prefix, 0) != 0) fail(ErrorKind::parse_error, "unknown ambient '" + ambient + "'");
  const std::string rest = ambient.substr(prefix.size());
  if (rest.empty() || !std::all_of(rest.begin(), rest.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
    fail(ErrorKind::parse_error, "unknown ambient '" + ambient + "'");
  return so_sampler(std::stoi(rest));
}

FiniteGroup weyl_group(const GroupSampler& ambient, const Eigen::MatrixXd& section, const WeylOptions& options) {
  if (section.rows() != ambient.dimension || section.cols() == 0)
    fail(ErrorKind::invalid_argument, "section basis has the wrong shape");
  if (!orthonormal_columns(section)) fail(ErrorKind::invalid_argument, "section basis is not orthonormal");
  std::mt19937_64 rng(options.seed);
  std::vector<Mat> found;
  auto add = [&](const Mat& g) {
    const Mat r = section.transpose() * g * section;
    if ((g * section - section * r).cwiseAbs().maxCoeff() > options.tol)
      fail(ErrorKind::not_a_section, "an element maps a section point into the section but not the section to itself");
    for (const auto& f : found)
      if ((f - r).cwiseAbs().maxCoeff() <= options.tol) return;
    found.push_back(r);
  };
  if (ambient.finite()) {
    for (const auto& g : ambient.elements) {
      const Mat r = section.transpose() * g * section;
      if ((g * section - section * r).cwiseAbs().maxCoeff() <= options.tol) add(g);
    }
  } else {
    const Vec s = random_in_section(section, rng);
    const Mat projector = Mat::Identity(s.size(), s.size()) - section * section.transpose();
    for (int k = 0; k < options.starts; ++k) {
      SectionDistance f{&ambient, ambient.sample(rng), projector, s};
      Eigen::NumericalDiff<SectionDistance> nd(f);
      Eigen::LevenbergMarquardt<Eigen::NumericalDiff<SectionDistance>> lm(nd);
      lm.parameters.xtol = 1e-15;
      lm.parameters.ftol = 1e-15;
      Vec theta = Vec::Zero(f.inputs());
      lm.minimize(theta);
      const Mat g = f.g0 * ambient.exp(theta);
      if ((projector * (g * s)).norm() <= 1e-10) add(g);
    }
  }
  if (found.empty()) fail(ErrorKind::not_a_section, "no group element preserves the section");
  for (const auto& r : found)
    if ((r.transpose() * r - Mat::Identity(r.rows(), r.cols())).cwiseAbs().maxCoeff() > options.tol)
      fail(ErrorKind::not_a_section, "restricted element is not orthogonal");
  for (auto& r : found) {
    // snap to orthogonal
    Eigen::JacobiSVD<Mat> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    r = svd.matrixU() * svd.matrixV().transpose();
  }
  const FiniteGroup w = enumerate_group(make_float_spec("W", found), options.cap);
  for (std::size_t i = 0; i < w.order(); ++i) {
    bool present = false;
    for (const auto& r : found) present = present || (r - w.element(i)).cwiseAbs().maxCoeff() <= options.tol;
    if (!present) fail(ErrorKind::not_a_section, "restricted elements are not closed under products");
  }
  return w;
}

GeneratorSystem<double> restrict_orbit_map(const GeneratorSystem<double>& system, const Eigen::MatrixXd& section,
                                           const FiniteGroup& weyl) {
  if (section.rows() != system.nvars) fail(ErrorKind::invalid_argument, "section and system dimensions differ");
  const int k = static_cast<int>(section.cols());
  if (weyl.dimension() != k) fail(ErrorKind::invalid_argument, "Weyl group acts on a different dimension");
  std::vector<Poly<double>> coords;
  for (Eigen::Index i = 0; i < section.rows(); ++i) {
    Poly<double> p(k);
    for (int j = 0; j < k; ++j)
      if (section(i, j) != 0.0) p = p + Poly<double>::variable(k, j) * section(i, j);
    coords.push_back(p);
  }
  GeneratorSystem<double> out;
  out.nvars = k;
  out.degrees = system.degrees;
  out.norm_index = system.norm_index;
  out.minimal = false;
  for (std::size_t i = 0; i < system.size(); ++i) {
    Poly<double> p = system.generators[i].compose(coords);
    p.prune(1e-13);
    if (!is_invariant(weyl, p, 1e-9))
      fail(ErrorKind::not_invariant, "restricted generator " + std::to_string(i) + " is not Weyl-invariant");
    out.generators.push_back(std::move(p));
  }
  return out;
}

GeneratorSystem<double> ambient_invariants(const GroupSampler& ambient, int cap) {
  if (ambient.finite()) {
    const FiniteGroup g = enumerate_group(make_float_spec("G", ambient.elements), ambient.elements.size() + 1);
    InvariantOptions options;
    options.cap = cap > 0 ? cap : static_cast<int>(g.order());
    return generate_invariants(g, options).numeric;
  }
  GeneratorSystem<double> s;
  s.nvars = ambient.dimension;
  s.generators.push_back(Poly<double>::norm_square(ambient.dimension));
  s.degrees.push_back(2);
  s.norm_index = 0;
  return s;
}

PolarSpec make_polar_spec(const GroupSampler& ambient, const Eigen::MatrixXd& section, int cap,
                          const WeylOptions& options) {
  PolarSpec spec;
  spec.ambient = ambient;
  spec.section = section;
  spec.weyl = weyl_group(ambient, section, options);
  spec.system = ambient_invariants(ambient, cap);
  return spec;
}

std::vector<Eigen::VectorXd> orbit_tangents(const GroupSampler& ambient, const Eigen::VectorXd& x, double h) {
  std::vector<Vec> out;
  for (const auto& l : ambient.algebra) {
    const Mat plus = (h * l).exp();
    const Mat minus = (-h * l).exp();
    out.push_back((plus * x - minus * x) / (2.0 * h));
  }
  return out;
}

PolarCertificate validate_polar(const PolarSpec& spec, int samples, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  PolarCertificate cert;
  const int m = spec.ambient.dimension;
  for (int s = 0; s < samples; ++s) {
    Vec x(m);
    for (int i = 0; i < m; ++i) x(i) = normal(rng);
    const Closest c = closest_to_section(spec.ambient, spec.section, x, rng, 8);
    cert.max_distance = std::max(cert.max_distance, c.distance / std::max(1.0, x.norm()));
    const Vec p = c.g * x;
    for (const auto& tau : orbit_tangents(spec.ambient, p)) {
      const double tn = tau.norm();
      if (tn <= 1e-12) continue;
      for (Eigen::Index j = 0; j < spec.section.cols(); ++j)
        cert.max_tangent = std::max(cert.max_tangent, std::abs(tau.dot(spec.section.col(j))) / tn);
    }
  }
  cert.passed = cert.max_distance <= tol && cert.max_tangent <= tol;
  return cert;
}

PolarLiftResult polar_lift(const Curve& curve, const PolarSpec& spec, const std::vector<double>& grid,
                           const LiftOptions& options, double orthogonality_tol) {
  const GeneratorSystem<double> restricted = restrict_orbit_map(spec.system, spec.section, spec.weyl);
  const OrbitMap map(restricted);
  PolarLiftResult out;
  out.section_lift = lift_curve(spec.weyl, map, curve, grid, options);
  out.lift = out.section_lift;
  for (auto& p : out.lift.points) p = spec.section * p;
  for (auto& d : out.lift.derivatives) d = spec.section * d;

  const std::size_t n = out.lift.grid.size();
  const std::size_t count = std::min<std::size_t>(50, n);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t i = count > 1 ? k * (n - 1) / (count - 1) : 0;
    const Vec& x = out.lift.points[i];
    const Vec& dx = out.lift.derivatives[i];
    const double dn = dx.norm();
    if (dn <= 1e-14) continue;
    for (const auto& tau : orbit_tangents(spec.ambient, x)) {
      const double tn = tau.norm();
      if (tn <= 1e-12) continue;
      out.max_orthogonality = std::max(out.max_orthogonality, std::abs(dx.dot(tau)) / (dn * tn));
    }
  }
  out.orthogonal = out.max_orthogonality <= orthogonality_tol;
  return out;
}

bool restriction_separates(const PolarSpec& spec, int samples, std::uint64_t seed) {
  const GeneratorSystem<double> restricted = restrict_orbit_map(spec.system, spec.section, spec.weyl);
  const OrbitMap map(restricted);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const int k = spec.weyl.dimension();
  LiftOptions options;
  options.seed = seed;
  for (int s = 0; s < samples; ++s) {
    Vec u(k);
    for (int i = 0; i < k; ++i) u(i) = normal(rng);
    const Vec y = find_preimage(spec.weyl, map, map.eval(u), options);
    bool in_orbit = false;
    for (const auto& w : spec.weyl.elements())
      in_orbit = in_orbit || (w * u - y).norm() <= 1e-6 * std::max(1.0, u.norm());
    if (!in_orbit) return false;
  }
  return true;
}

CounterexampleReport so2_counterexamples() {
  CounterexampleReport r;
  const double pi = std::numbers::pi;
  auto straight = [](double t) { return Vec(Eigen::Vector2d(t, 0.0)); };
  auto turning = [](double t) { return Vec(Eigen::Vector2d(t * std::cos(t), t * std::sin(t))); };
  auto spiral = [](double t) {
    if (t == 0.0) return Vec(Eigen::Vector2d::Zero());
    return Vec(Eigen::Vector2d(t * t * std::cos(1.0 / t), t * t * std::sin(1.0 / t)));
  };
  for (double t : uniform_grid(0.0, 2.0 * pi, 201)) {
    r.max_residual = std::max(r.max_residual, std::abs(straight(t).squaredNorm() - t * t));
    r.max_residual = std::max(r.max_residual, std::abs(turning(t).squaredNorm() - t * t));
  }
  for (double t : uniform_grid(-1.0, 1.0, 201))
    r.max_residual = std::max(r.max_residual, std::abs(spiral(t).squaredNorm() - std::pow(t, 4)));
  r.residual_ok = r.max_residual <= 1e-10;

  const double t0 = 2.0 * pi;
  r.derivative_straight = central_difference(straight, t0, 1e-3);
  r.derivative_turning = central_difference(turning, t0, 1e-3);
  r.pair_error = std::max((r.derivative_straight - Eigen::Vector2d(1.0, 0.0)).cwiseAbs().maxCoeff(),
                          (r.derivative_turning - Eigen::Vector2d(1.0, 2.0 * pi)).cwiseAbs().maxCoeff());
  r.pair_ok = r.pair_error <= 1e-9;

  r.oscillation_ok = true;
  for (int level = 0; level < 4; ++level) {
    const double delta = 0.1 / std::pow(2.0, level);
    double lo = 1e300, hi = -1e300;
    for (double t : uniform_grid(0.5 * delta, delta, 400)) {
      const double d = central_difference(spiral, t, 1e-4 * t * t)(0);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    r.oscillation.push_back(hi - lo);
    r.oscillation_ok = r.oscillation_ok && hi - lo >= 1.0;
  }
  return r;
}

}  // namespace orbitlift
