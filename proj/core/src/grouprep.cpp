#include "orbitlift/grouprep.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>

#include "orbitlift/error.hpp"

namespace orbitlift {

namespace {

std::uint64_t matrix_key(const Eigen::MatrixXd& m) {
  std::uint64_t h = 1469598103934665603ULL;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const auto q = static_cast<std::int64_t>(std::llround(m.data()[i] * 1e6));
    h ^= static_cast<std::uint64_t>(q) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

bool lex_less_rounded(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const auto x = std::llround(a(i, j) * 1e9);
      const auto y = std::llround(b(i, j) * 1e9);
      if (x != y) return x < y;
    }
  return false;
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, double tol) {
  const Eigen::Index n = m.cols();
  if (m.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double cut = tol * std::max(1.0, smax);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

Eigen::MatrixXd orthonormal_complement(const Eigen::MatrixXd& basis, Eigen::Index n) {
  if (basis.cols() == 0) return Eigen::MatrixXd::Identity(n, n);
  return null_space(basis.transpose(), 1e-9);
}

std::vector<long long> projector_key(const Eigen::MatrixXd& basis) {
  const Eigen::MatrixXd p = basis * basis.transpose();
  std::vector<long long> key;
  key.reserve(static_cast<std::size_t>(p.size()) + 1);
  key.push_back(basis.cols());
  for (Eigen::Index i = 0; i < p.size(); ++i) key.push_back(std::llround(p.data()[i] * 1e6));
  return key;
}

void check_orthogonal(const Eigen::MatrixXd& g, std::size_t which) {
  if (g.rows() != g.cols()) fail(ErrorKind::not_orthogonal, "generator " + std::to_string(which) + " is not square");
  const double err = (g.transpose() * g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
  if (err > 1e-9) fail(ErrorKind::not_orthogonal, "generator " + std::to_string(which) + " deviates by " + format_double(err));
}

}  // namespace

std::string GroundField::label() const {
  switch (kind) {
    case FieldKind::rational: return "rational";
    case FieldKind::quadratic: return "sqrt:" + std::to_string(radicand);
    case FieldKind::floating: return "float";
  }
  return "float";
}

GroundField GroundField::parse(const std::string& label) {
  if (label == "rational") return {FieldKind::rational, 0};
  if (label == "float") return {FieldKind::floating, 0};
  if (label.rfind("sqrt:", 0) == 0) {
    long d = 0;
    try {
      d = std::stol(label.substr(5));
    } catch (const std::logic_error&) {
      fail(ErrorKind::parse_error, "bad field '" + label + "'");
    }
    if (d <= 1) fail(ErrorKind::parse_error, "bad radicand in '" + label + "'");
    return {FieldKind::quadratic, d};
  }
  fail(ErrorKind::parse_error, "unknown field '" + label + "'");
}

Eigen::MatrixXd to_eigen(const ExactMatrix& m) {
  Eigen::MatrixXd r(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).to_double();
  return r;
}

GroupSpec make_float_spec(std::string name, std::vector<Eigen::MatrixXd> generators) {
  GroupSpec spec;
  spec.name = std::move(name);
  spec.field = {FieldKind::floating, 0};
  spec.dimension = generators.empty() ? 0 : static_cast<int>(generators.front().rows());
  spec.generators = std::move(generators);
  return spec;
}

GroupSpec make_exact_spec(std::string name, GroundField field, std::vector<ExactMatrix> generators) {
  GroupSpec spec;
  spec.name = std::move(name);
  spec.field = field;
  spec.dimension = generators.empty() ? 0 : generators.front().rows();
  for (const auto& g : generators) spec.generators.push_back(to_eigen(g));
  spec.exact_generators = std::move(generators);
  return spec;
}

void FiniteGroup::build_lookup() {
  lookup_.clear();
  for (std::size_t i = 0; i < elements_.size(); ++i) lookup_.emplace(matrix_key(elements_[i]), i);
}

std::optional<std::size_t> FiniteGroup::index_of(const Eigen::MatrixXd& m, double tol) const {
  auto [lo, hi] = lookup_.equal_range(matrix_key(m));
  for (auto it = lo; it != hi; ++it)
    if ((elements_[it->second] - m).cwiseAbs().maxCoeff() <= tol) return it->second;
  for (std::size_t i = 0; i < elements_.size(); ++i)
    if ((elements_[i] - m).cwiseAbs().maxCoeff() <= tol) return i;
  return std::nullopt;
}

std::size_t FiniteGroup::product(std::size_t i, std::size_t j) const {
  auto r = index_of(elements_[i] * elements_[j]);
  if (!r) fail(ErrorKind::not_finite, "product left the group");
  return *r;
}

std::size_t FiniteGroup::inverse(std::size_t i) const {
  auto r = index_of(elements_[i].transpose());
  if (!r) fail(ErrorKind::not_finite, "inverse left the group");
  return *r;
}

FiniteGroup FiniteGroup::subgroup(std::span<const std::size_t> indices, const std::string& name) const {
  FiniteGroup sub;
  sub.name_ = name;
  sub.dimension_ = dimension_;
  sub.field_ = field_;
  std::vector<std::size_t> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  // keep identity at position 0
  auto id = std::find_if(sorted.begin(), sorted.end(), [&](std::size_t i) {
    return (elements_[i] - Eigen::MatrixXd::Identity(dimension_, dimension_)).cwiseAbs().maxCoeff() < 1e-9;
  });
  if (id == sorted.end()) fail(ErrorKind::invalid_argument, "subgroup without identity");
  std::rotate(sorted.begin(), id, id + 1);
  for (std::size_t i : sorted) {
    sub.elements_.push_back(elements_[i]);
    if (has_exact()) sub.exact_elements_.push_back(exact_elements_[i]);
    sub.parent_indices_.push_back(parent_indices_.empty() ? i : parent_indices_[i]);
  }
  sub.generator_indices_.resize(sub.elements_.size());
  std::iota(sub.generator_indices_.begin(), sub.generator_indices_.end(), 0);
  sub.build_lookup();
  for (std::size_t a = 0; a < sub.elements_.size(); ++a)
    for (std::size_t b : {std::size_t{0}, a}) {
      if (!sub.index_of(sub.elements_[a] * sub.elements_[b]))
        fail(ErrorKind::invalid_argument, "subgroup indices are not closed under products");
    }
  return sub;
}

FiniteGroup enumerate_group(const GroupSpec& spec, std::size_t cap) {
  if (spec.generators.empty()) fail(ErrorKind::invalid_argument, "group needs at least one generator");
  const int n = spec.dimension;
  for (std::size_t i = 0; i < spec.generators.size(); ++i) {
    if (spec.generators[i].rows() != n) fail(ErrorKind::invalid_argument, "generator dimension mismatch");
    check_orthogonal(spec.generators[i], i);
  }
  const bool exact = spec.field.exact() && spec.exact_generators.size() == spec.generators.size();
  if (exact) {
    for (std::size_t i = 0; i < spec.exact_generators.size(); ++i) {
      const auto& g = spec.exact_generators[i];
      if (!(g.transpose() * g == ExactMatrix::identity(n)))
        fail(ErrorKind::not_orthogonal, "generator " + std::to_string(i) + " is not exactly orthogonal");
    }
  }

  std::vector<Eigen::MatrixXd> elems{Eigen::MatrixXd::Identity(n, n)};
  std::vector<ExactMatrix> exact_elems;
  if (exact) exact_elems.push_back(ExactMatrix::identity(n));
  std::multimap<std::uint64_t, std::size_t> seen{{matrix_key(elems[0]), 0}};

  auto find = [&](const Eigen::MatrixXd& m) -> std::optional<std::size_t> {
    auto [lo, hi] = seen.equal_range(matrix_key(m));
    for (auto it = lo; it != hi; ++it)
      if ((elems[it->second] - m).cwiseAbs().maxCoeff() <= 1e-7) return it->second;
    return std::nullopt;
  };

  for (std::size_t head = 0; head < elems.size(); ++head) {
    for (std::size_t gi = 0; gi < spec.generators.size(); ++gi) {
      Eigen::MatrixXd prod = elems[head] * spec.generators[gi];
      if (find(prod)) continue;
      if (elems.size() >= cap) fail(ErrorKind::cap_exceeded, "more than " + std::to_string(cap) + " elements");
      if (exact) {
        ExactMatrix ep = exact_elems[head] * spec.exact_generators[gi];
        prod = to_eigen(ep);
        exact_elems.push_back(std::move(ep));
      }
      seen.emplace(matrix_key(prod), elems.size());
      elems.push_back(std::move(prod));
    }
  }

  std::vector<std::size_t> order(elems.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin() + 1, order.end(),
            [&](std::size_t a, std::size_t b) { return lex_less_rounded(elems[a], elems[b]); });

  FiniteGroup g;
  g.name_ = spec.name;
  g.dimension_ = n;
  g.field_ = exact ? spec.field : GroundField{FieldKind::floating, 0};
  for (std::size_t i : order) {
    g.elements_.push_back(elems[i]);
    if (exact) g.exact_elements_.push_back(exact_elems[i]);
  }
  g.parent_indices_.resize(g.elements_.size());
  std::iota(g.parent_indices_.begin(), g.parent_indices_.end(), 0);
  g.build_lookup();
  for (const auto& gen : spec.generators) g.generator_indices_.push_back(*g.index_of(gen, 1e-7));
  return g;
}

IsotropyData isotropy(const FiniteGroup& group, const Eigen::VectorXd& v, double tol) {
  IsotropyData data;
  data.base_point = v;
  const double norm = v.norm();
  for (std::size_t i = 0; i < group.order(); ++i) {
    if (norm == 0.0) {
      data.stabilizer.push_back(i);
      continue;
    }
    const double rel = (group.element(i) * v - v).norm() / norm;
    if (rel <= tol) {
      data.stabilizer.push_back(i);
    } else if (rel <= 10.0 * tol) {
      fail(ErrorKind::tolerance_ambiguity,
           "element " + std::to_string(i) + " moves the point by " + format_double(rel) + " (relative)");
    }
  }
  data.index = group.order() / data.stabilizer.size();
  return data;
}

Eigen::MatrixXd fixed_space(std::span<const Eigen::MatrixXd> elements, double tol) {
  if (elements.empty()) return {};
  const Eigen::Index n = elements.front().rows();
  Eigen::MatrixXd stacked(static_cast<Eigen::Index>(elements.size()) * n, n);
  for (std::size_t i = 0; i < elements.size(); ++i)
    stacked.middleRows(static_cast<Eigen::Index>(i) * n, n) = elements[i] - Eigen::MatrixXd::Identity(n, n);
  return null_space(stacked, tol);
}

Eigen::MatrixXd fixed_space(const FiniteGroup& group, double tol) {
  std::vector<Eigen::MatrixXd> gens;
  for (std::size_t i : group.generator_indices()) gens.push_back(group.element(i));
  return fixed_space(gens, tol);
}

FixedSplit split_fixed(const FiniteGroup& group, double tol) {
  FixedSplit s;
  s.fixed = fixed_space(group, tol);
  s.complement = orthonormal_complement(s.fixed, group.dimension());
  return s;
}

std::vector<Eigen::MatrixXd> restrict_elements(const FiniteGroup& group, const Eigen::MatrixXd& basis) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(group.order());
  for (const auto& g : group.elements()) out.push_back(basis.transpose() * g * basis);
  return out;
}

namespace {

// Dimension of the space of symmetric matrices commuting with the restricted
// generators; 1 for an irreducible block. Returns -1 when the gap is unclear.
int symmetric_commutant_dimension(const std::vector<Eigen::MatrixXd>& gens, double tol) {
  const Eigen::Index k = gens.front().rows();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> params;
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i; j < k; ++j) params.emplace_back(i, j);
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(gens.size()) * k * k,
                                              static_cast<Eigen::Index>(params.size()));
  for (std::size_t p = 0; p < params.size(); ++p) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(k, k);
    x(params[p].first, params[p].second) = 1.0;
    x(params[p].second, params[p].first) = 1.0;
    for (std::size_t g = 0; g < gens.size(); ++g) {
      Eigen::MatrixXd c = gens[g] * x - x * gens[g];
      sys.block(static_cast<Eigen::Index>(g) * k * k, static_cast<Eigen::Index>(p), k * k, 1) =
          Eigen::Map<Eigen::VectorXd>(c.data(), k * k);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? std::max(1.0, s(0)) : 1.0;
  int nullity = static_cast<int>(params.size()) - static_cast<int>(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double r = s(i) / smax;
    if (r <= tol) {
      ++nullity;
    } else if (r <= 1e3 * tol) {
      return -1;
    }
  }
  return nullity;
}

}  // namespace

Decomposition irreducible_decomposition(const FiniteGroup& group, double tol, std::uint64_t seed) {
  const int n = group.dimension();
  std::vector<Eigen::MatrixXd> gens;
  for (std::size_t i : group.generator_indices()) gens.push_back(group.element(i));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  constexpr int kMaxAttempts = 6;
  for (int attempt = 1; attempt <= kMaxAttempts; ++attempt) {
    Eigen::MatrixXd s(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = normal(rng);
    Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(n, n);
    for (const auto& g : group.elements()) avg += g * s * g.transpose();
    avg /= static_cast<double>(group.order());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(avg);
    const auto& vals = eig.eigenvalues();
    const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
    Decomposition dec;
    dec.attempts = attempt;
    bool ok = true;
    for (int start = 0; start < n && ok;) {
      int stop = start + 1;
      while (stop < n && std::abs(vals(stop) - vals(start)) <= tol * scale * 10) ++stop;
      Eigen::MatrixXd basis = eig.eigenvectors().middleCols(start, stop - start);
      std::vector<Eigen::MatrixXd> restricted;
      for (const auto& g : gens) {
        const double leak = ((Eigen::MatrixXd::Identity(n, n) - basis * basis.transpose()) * g * basis).norm();
        if (leak > 1e-7) ok = false;
        restricted.push_back(basis.transpose() * g * basis);
      }
      if (ok && symmetric_commutant_dimension(restricted, tol) != 1) ok = false;
      dec.components.push_back(basis);
      start = stop;
    }
    if (!ok) continue;
    dec.fixed = fixed_space(group);
    return dec;
  }
  fail(ErrorKind::certification_failed, "irreducibility certificate failed after retries");
}

std::vector<Eigen::MatrixXd> isotropy_strata(const FiniteGroup& group, const Eigen::MatrixXd& subspace, double tol) {
  const Eigen::Index m = group.dimension();
  const Eigen::Index k = subspace.cols();
  std::vector<Eigen::MatrixXd> strata{subspace};
  std::map<std::vector<long long>, std::size_t> known{{projector_key(subspace), 0}};
  auto add = [&](const Eigen::MatrixXd& basis) {
    if (basis.cols() == 0) return;
    auto key = projector_key(basis);
    if (known.count(key)) return;
    known.emplace(std::move(key), strata.size());
    strata.push_back(basis);
  };
  for (std::size_t i = 1; i < group.order(); ++i) {
    Eigen::MatrixXd sys = (group.element(i) - Eigen::MatrixXd::Identity(m, m)) * subspace;
    Eigen::MatrixXd ns = null_space(sys, tol);
    if (ns.cols() == 0 || ns.cols() == k) continue;
    add(subspace * ns);
  }
  for (std::size_t a = 1; a < strata.size(); ++a) {
    for (std::size_t b = 1; b < a; ++b) {
      const Eigen::MatrixXd& wa = strata[a];
      const Eigen::MatrixXd& wb = strata[b];
      Eigen::MatrixXd sys(2 * m, k);
      sys.topRows(m) = (Eigen::MatrixXd::Identity(m, m) - wa * wa.transpose()) * subspace;
      sys.bottomRows(m) = (Eigen::MatrixXd::Identity(m, m) - wb * wb.transpose()) * subspace;
      Eigen::MatrixXd ns = null_space(sys, tol);
      if (ns.cols() == 0) continue;
      add(subspace * ns);
    }
  }
  return strata;
}

std::vector<IsotropyData> max_isotropy_per_component(const FiniteGroup& group, const Decomposition& decomposition,
                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<IsotropyData> out;
  for (const auto& comp : decomposition.components) {
    std::optional<IsotropyData> best;
    for (const auto& stratum : isotropy_strata(group, comp)) {
      Eigen::VectorXd coeffs(stratum.cols());
      for (Eigen::Index i = 0; i < coeffs.size(); ++i) coeffs(i) = normal(rng);
      Eigen::VectorXd v = stratum * coeffs;
      v.normalize();
      IsotropyData iso = isotropy(group, v);
      if (!best || iso.stabilizer.size() > best->stabilizer.size() ||
          (iso.stabilizer.size() == best->stabilizer.size() && iso.stabilizer < best->stabilizer))
        best = std::move(iso);
    }
    out.push_back(std::move(*best));
  }
  return out;
}

int compute_k(const FiniteGroup& group, const Decomposition& decomposition, int d, std::uint64_t seed) {
  int k = d;
  for (const auto& iso : max_isotropy_per_component(group, decomposition, seed)) k = std::max(k, static_cast<int>(iso.index));
  return k;
}

}  // namespace orbitlift
