#include "orbitlift/invariants.hpp"

#include <map>
#include <cstdio>
#include <cstdlib>
#include <random>

#include "orbitlift/error.hpp"
#include "orbitlift/linalg.hpp"
#include "orbitlift/orbit_map.hpp"

namespace orbitlift {

namespace {

template <class T>
DenseMatrix<T> element_matrix(const FiniteGroup& group, std::size_t i);

template <>
DenseMatrix<QuadraticNumber> element_matrix<QuadraticNumber>(const FiniteGroup& group, std::size_t i) {
  return group.exact_element(i);
}

template <>
DenseMatrix<double> element_matrix<double>(const FiniteGroup& group, std::size_t i) {
  const auto& g = group.element(i);
  DenseMatrix<double> m(static_cast<int>(g.rows()), static_cast<int>(g.cols()));
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) m(r, c) = g(r, c);
  return m;
}

template <class T>
void check_bits(const std::vector<T>& v, std::size_t bound) {
  if constexpr (ScalarTraits<T>::exact) {
    for (const auto& x : v)
      if (x.bit_size() > bound) fail(ErrorKind::field_overflow, "coefficient exceeds " + std::to_string(bound) + " bits");
  }
}

// sums[e][a] = (1/|G|) sum_g (x^a o g) as a dense vector over bases[e].
template <class T>
std::vector<std::vector<std::vector<T>>> reynolds_images(const FiniteGroup& group,
                                                         const std::vector<MonomialBasis>& bases,
                                                         std::size_t bit_bound) {
  const int cap = static_cast<int>(bases.size()) - 1;
  const int m = group.dimension();
  std::vector<std::vector<std::vector<std::size_t>>> shift(cap + 1);
  std::vector<std::vector<std::pair<int, std::size_t>>> pred(cap + 1);
  for (int e = 1; e <= cap; ++e) {
    const auto& lo = bases[e - 1];
    const auto& hi = bases[e];
    shift[e].resize(lo.size());
    for (std::size_t ib = 0; ib < lo.size(); ++ib) {
      Exponent x = lo[ib];
      for (int k = 0; k < m; ++k) {
        ++x[k];
        shift[e][ib].push_back(hi.index(x));
        --x[k];
      }
    }
    for (std::size_t ia = 0; ia < hi.size(); ++ia) {
      Exponent x = hi[ia];
      int j = 0;
      while (x[j] == 0) ++j;
      --x[j];
      pred[e].emplace_back(j, lo.index(x));
    }
  }

  std::vector<std::vector<std::vector<T>>> sums(cap + 1);
  for (int e = 0; e <= cap; ++e)
    sums[e].assign(bases[e].size(), std::vector<T>(bases[e].size(), ScalarTraits<T>::zero()));

  for (std::size_t gi = 0; gi < group.order(); ++gi) {
    const DenseMatrix<T> g = element_matrix<T>(group, gi);
    std::vector<std::vector<T>> prev{{ScalarTraits<T>::one()}};
    for (int e = 1; e <= cap; ++e) {
      const std::size_t n = bases[e].size();
      std::vector<std::vector<T>> cur(n, std::vector<T>(n, ScalarTraits<T>::zero()));
      for (std::size_t ia = 0; ia < n; ++ia) {
        const auto [j, ib] = pred[e][ia];
        const auto& src = prev[ib];
        auto& dst = cur[ia];
        for (std::size_t ibb = 0; ibb < src.size(); ++ibb) {
          if (ScalarTraits<T>::is_zero(src[ibb])) continue;
          for (int k = 0; k < m; ++k) {
            const T& gk = g(j, k);
            if (ScalarTraits<T>::is_zero(gk)) continue;
            dst[shift[e][ibb][k]] += src[ibb] * gk;
          }
        }
        auto& acc = sums[e][ia];
        for (std::size_t t = 0; t < n; ++t)
          if (!ScalarTraits<T>::is_zero(dst[t])) acc[t] += dst[t];
      }
      prev = std::move(cur);
    }
  }
  const T inv_order = ScalarTraits<T>::one() / ScalarTraits<T>::from_long(static_cast<long>(group.order()));
  for (int e = 1; e <= cap; ++e)
    for (auto& v : sums[e]) {
      for (auto& x : v)
        if (!ScalarTraits<T>::is_zero(x)) x *= inv_order;
      check_bits(v, bit_bound);
    }
  return sums;
}

template <class T>
Poly<T> normalized(Poly<T> p) {
  if constexpr (!ScalarTraits<T>::exact) p.prune(1e-13);
  if (p.is_zero()) return p;
  const T lead = p.leading().second;
  p *= ScalarTraits<T>::one() / lead;
  return p;
}

void weighted_exponents_rec(const std::vector<int>& degrees, std::size_t i, int remaining, Exponent& cur,
                            std::vector<Exponent>& out) {
  if (i == degrees.size()) {
    if (remaining == 0) out.push_back(cur);
    return;
  }
  for (int k = 0; k * degrees[i] <= remaining; ++k) {
    cur[i] = static_cast<std::uint8_t>(k);
    weighted_exponents_rec(degrees, i + 1, remaining - k * degrees[i], cur, out);
  }
  cur[i] = 0;
}

template <class T>
class ProductCache {
 public:
  explicit ProductCache(const GeneratorSystem<T>& sys) : sys_(sys) {}

  const Poly<T>& get(const Exponent& b) {
    auto it = cache_.find(b);
    if (it != cache_.end()) return it->second;
    std::size_t i = 0;
    while (i < b.size() && b[i] == 0) ++i;
    Poly<T> value = Poly<T>::constant(sys_.nvars, ScalarTraits<T>::one());
    if (i < b.size()) {
      Exponent rest = b;
      --rest[i];
      value = get(rest) * sys_.generators[i];
    }
    return cache_.emplace(b, std::move(value)).first->second;
  }

 private:
  const GeneratorSystem<T>& sys_;
  std::map<Exponent, Poly<T>> cache_;
};

template <class T>
GeneratorSystem<T> generate_impl(const FiniteGroup& group, const InvariantOptions& opt) {
  const int m = group.dimension();
  const MonomialOrder order = opt.order ? *opt.order : MonomialOrder::standard(m);
  std::vector<MonomialBasis> bases;
  for (int e = 0; e <= opt.cap; ++e) bases.emplace_back(m, e, order);
  const auto images = reynolds_images<T>(group, bases, opt.bit_bound);

  GeneratorSystem<T> sys;
  sys.nvars = m;
  for (int e = 1; e <= opt.cap; ++e) {
    const auto& basis = bases[e];
    Echelon<T> inv(basis.size(), opt.rank_tol);
    if constexpr (!ScalarTraits<T>::exact) {
      double ref = 1.0;
      for (const auto& img : images[e]) {
        double s = 0.0;
        for (double x : img) s += x * x;
        ref = std::max(ref, std::sqrt(s));
      }
      inv.set_reference(ref);
    }
    std::vector<const std::vector<T>*> inv_vectors;
    for (const auto& img : images[e])
      if (inv.add(img)) inv_vectors.push_back(&img);

    Echelon<T> dec(basis.size(), opt.rank_tol);
    if (!sys.generators.empty()) {
      ProductCache<T> cache(sys);
      Exponent cur(sys.generators.size(), 0);
      std::vector<Exponent> bs;
      weighted_exponents_rec(sys.degrees, 0, e, cur, bs);
      for (const auto& b : bs) dec.add(to_dense(cache.get(b), basis));
    }
    RankCertificate cert;
    cert.degree = e;
    cert.invariant_dim = inv.rank();
    cert.decomposable_dim = dec.rank();
    std::vector<Poly<T>> fresh;
    if (e == 2) {
      const Poly<T> norm = Poly<T>::norm_square(m);
      if (dec.add(to_dense(norm, basis))) {
        sys.norm_index = sys.generators.size() + fresh.size();
        fresh.push_back(norm);
      }
    }
    for (const auto* v : inv_vectors)
      if (dec.add(*v)) fresh.push_back(normalized(from_dense(*v, basis)));
    cert.new_generators = fresh.size();
    if constexpr (!ScalarTraits<T>::exact) {
      cert.min_accepted_ratio = std::min(inv.min_accepted_ratio(), dec.min_accepted_ratio());
      cert.max_rejected_ratio = std::max(inv.max_rejected_ratio(), dec.max_rejected_ratio());
    }
    if (dec.rank() != inv.rank())
      fail(ErrorKind::certification_failed, "rank mismatch in degree " + std::to_string(e));
    sys.certificate.push_back(cert);
    for (auto& p : fresh) {
      sys.generators.push_back(std::move(p));
      sys.degrees.push_back(e);
    }
  }
  return sys;
}

void check_separation(const FiniteGroup& group, const GeneratorSystem<double>& sys, std::uint64_t seed, int cap) {
  if (sys.generators.empty()) fail(ErrorKind::cap_too_low, "no generators up to degree " + std::to_string(cap));
  const OrbitMap map(sys);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const int m = group.dimension();
  auto random_vector = [&] {
    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) v(i) = normal(rng);
    return v;
  };
  auto sigma_min = [&](const Eigen::VectorXd& x) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(map.jacobian(x));
    const auto& s = svd.singularValues();
    return std::make_pair(s(s.size() - 1), s(0));
  };
  FiberSolveOptions fine;
  fine.tol = 1e-15;
  fine.max_iterations = 200;
  double best_rank_ratio = 0.0;
  for (int trial = 0; trial < 6; ++trial) {
    Eigen::VectorXd u = random_vector();
    u.normalize();
    const auto [smin, smax] = sigma_min(u);
    best_rank_ratio = std::max(best_rank_ratio, smin / smax);
    const Eigen::VectorXd c = map.eval(u);
    for (int s = 0; s < 16; ++s) {
      const FiberSolution sol = solve_fiber(map, c, random_vector(), fine);
      if (sol.residual > 1e-9) continue;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& g : group.elements()) best = std::min(best, (g * u - sol.x).norm());
      const double bound = std::max(1e-7, 1e3 * sol.residual / std::max(sigma_min(sol.x).first, 1e-300));
      if (best > bound)
        fail(ErrorKind::cap_too_low, "generators up to degree " + std::to_string(cap) +
                                         " do not separate orbits (distance " + format_double(best) + ")");
    }
  }
  if (static_cast<int>(sys.size()) < m || best_rank_ratio <= 1e-12)
    fail(ErrorKind::cap_too_low, "orbit map up to degree " + std::to_string(cap) + " has deficient generic rank");
}

}  // namespace

GeneratorSystem<double> to_double(const GeneratorSystem<QuadraticNumber>& s) {
  GeneratorSystem<double> r;
  r.nvars = s.nvars;
  for (const auto& g : s.generators) r.generators.push_back(g.to_double());
  r.degrees = s.degrees;
  r.norm_index = s.norm_index;
  r.minimal = s.minimal;
  r.certificate = s.certificate;
  return r;
}

InvariantSystem generate_invariants(const FiniteGroup& group, const InvariantOptions& options) {
  if (options.cap < 1) fail(ErrorKind::invalid_argument, "degree cap must be positive");
  InvariantSystem out;
  out.field = group.field();
  if (group.has_exact()) {
    out.exact = generate_impl<QuadraticNumber>(group, options);
    out.numeric = to_double(*out.exact);
  } else {
    out.numeric = generate_impl<double>(group, options);
  }
  if (options.check_separation) check_separation(group, out.numeric, options.seed, options.cap);
  return out;
}

int compute_d(const InvariantSystem& system) { return system.d(); }

Poly<QuadraticNumber> reynolds(const FiniteGroup& group, const Poly<QuadraticNumber>& p) {
  if (!group.has_exact()) fail(ErrorKind::invalid_argument, "exact Reynolds operator needs an exact group");
  Poly<QuadraticNumber> acc(p.nvars());
  for (std::size_t i = 0; i < group.order(); ++i) acc += linear_substitution(p, group.exact_element(i));
  acc *= QuadraticNumber(1) / QuadraticNumber(static_cast<long>(group.order()));
  return acc;
}

Poly<double> reynolds(const FiniteGroup& group, const Poly<double>& p) {
  Poly<double> acc(p.nvars());
  for (const auto& g : group.elements()) acc += linear_substitution(p, g);
  acc *= 1.0 / static_cast<double>(group.order());
  acc.prune(1e-14);
  return acc;
}

bool is_invariant(const FiniteGroup& group, const Poly<QuadraticNumber>& p) {
  for (std::size_t i : group.generator_indices())
    if (!(linear_substitution(p, group.exact_element(i)) == p)) return false;
  return true;
}

bool is_invariant(const FiniteGroup& group, const Poly<double>& p, double tol) {
  const double scale = std::max(1.0, p.max_abs_coefficient());
  for (std::size_t i : group.generator_indices()) {
    const Poly<double> diff = linear_substitution(p, group.element(i)) - p;
    if (diff.max_abs_coefficient() > tol * scale) return false;
  }
  return true;
}

std::vector<Exponent> weighted_exponents(const std::vector<int>& degrees, int e) {
  std::vector<Exponent> out;
  Exponent cur(degrees.size(), 0);
  weighted_exponents_rec(degrees, 0, e, cur, out);
  std::sort(out.begin(), out.end(), GradedLexLess{});
  return out;
}

template <class T>
Poly<T> express_in_generators(const Poly<T>& p, const GeneratorSystem<T>& system, double tol) {
  const int n = static_cast<int>(system.size());
  Poly<T> result(n);
  if (p.is_zero()) return result;
  ProductCache<T> cache(system);
  for (int e = p.min_degree(); e <= p.degree(); ++e) {
    const Poly<T> part = p.homogeneous_part(e);
    if (part.is_zero()) continue;
    if (e == 0) {
      result.add_term(Exponent(n, 0), part.terms().begin()->second);
      continue;
    }
    const MonomialBasis basis(p.nvars(), e);
    const auto bs = weighted_exponents(system.degrees, e);
    Echelon<T> ech(basis.size(), tol);
    std::vector<const Exponent*> accepted;
    for (const auto& b : bs)
      if (ech.add(to_dense(cache.get(b), basis))) accepted.push_back(&b);
    const auto target = to_dense(part, basis);
    const auto red = ech.reduce(target);
    if (!red.in_span) fail(ErrorKind::not_in_algebra, "degree " + std::to_string(e) + " part is not in the algebra");
    for (std::size_t j = 0; j < accepted.size(); ++j) result.add_term(*accepted[j], red.coefficients[j]);
  }
  if constexpr (!ScalarTraits<T>::exact) result.prune(1e-14);
  return result;
}

template <class T>
std::vector<Poly<T>> change_of_generators(const GeneratorSystem<T>& from, const GeneratorSystem<T>& to, double tol) {
  std::vector<Poly<T>> out;
  for (const auto& g : to.generators) out.push_back(express_in_generators(g, from, tol));
  return out;
}

template Poly<QuadraticNumber> express_in_generators(const Poly<QuadraticNumber>&,
                                                     const GeneratorSystem<QuadraticNumber>&, double);
template Poly<double> express_in_generators(const Poly<double>&, const GeneratorSystem<double>&, double);
template std::vector<Poly<QuadraticNumber>> change_of_generators(const GeneratorSystem<QuadraticNumber>&,
                                                                 const GeneratorSystem<QuadraticNumber>&, double);
template std::vector<Poly<double>> change_of_generators(const GeneratorSystem<double>&, const GeneratorSystem<double>&,
                                                        double);

GeneratorSystem<double> restrict_to_subspace(const GeneratorSystem<double>& system, const FiniteGroup& group,
                                             const Eigen::MatrixXd& basis, double tol) {
  const Eigen::Index m = basis.rows();
  const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(m, m) - basis * basis.transpose();
  for (std::size_t i : group.generator_indices())
    if ((proj * group.element(i) * basis).norm() > tol * std::max<double>(1.0, static_cast<double>(basis.cols())))
      fail(ErrorKind::not_invariant, "subspace is not stable under generator " + std::to_string(i));
  const int k = static_cast<int>(basis.cols());
  std::vector<Poly<double>> subs;
  for (Eigen::Index j = 0; j < m; ++j) {
    Poly<double> l(k);
    for (int c = 0; c < k; ++c) {
      Exponent e(k, 0);
      e[c] = 1;
      l.add_term(e, basis(j, c));
    }
    subs.push_back(l);
  }
  GeneratorSystem<double> out;
  out.nvars = k;
  out.minimal = false;
  for (std::size_t i = 0; i < system.size(); ++i) {
    Poly<double> r = system.generators[i].compose(subs);
    r.prune(1e-13);
    out.generators.push_back(std::move(r));
    out.degrees.push_back(system.degrees[i]);
  }
  out.norm_index = system.norm_index;
  return out;
}

GeneratorSystem<double> direct_sum_system(const GeneratorSystem<double>& a, const GeneratorSystem<double>& b) {
  const int n = a.nvars + b.nvars;
  auto embed = [n](const Poly<double>& p, int offset) {
    Poly<double> r(n);
    for (const auto& [e, c] : p.terms()) {
      Exponent x(n, 0);
      for (int i = 0; i < p.nvars(); ++i) x[offset + i] = e[i];
      r.add_term(x, c);
    }
    return r;
  };
  GeneratorSystem<double> out;
  out.nvars = n;
  out.minimal = a.minimal && b.minimal;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.generators.push_back(embed(a.generators[i], 0));
    out.degrees.push_back(a.degrees[i]);
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    out.generators.push_back(embed(b.generators[i], a.nvars));
    out.degrees.push_back(b.degrees[i]);
  }
  return out;
}

}  // namespace orbitlift
