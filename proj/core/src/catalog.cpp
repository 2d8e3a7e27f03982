#include "orbitlift/catalog.hpp"

#include <cmath>
#include <numbers>

#include "orbitlift/error.hpp"

namespace orbitlift {

namespace {

using Q = QuadraticNumber;

Q rat(long p, long q = 1) { return Q(mpq_class(p, q)); }
Q surd(long p, long q, long radicand) { return Q(mpq_class(0), mpq_class(p, q), radicand); }

// Reflection I - 2 r r^T / (r.r).
template <class T>
DenseMatrix<T> reflection(const std::vector<T>& r) {
  const int n = static_cast<int>(r.size());
  T rr = ScalarTraits<T>::zero();
  for (const auto& x : r) rr += x * x;
  DenseMatrix<T> m = DenseMatrix<T>::identity(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) -= ScalarTraits<T>::from_long(2) * r[i] * r[j] / rr;
  return m;
}

template <class T>
DenseMatrix<T> permutation(const std::vector<int>& image) {
  const int n = static_cast<int>(image.size());
  DenseMatrix<T> m(n, n);
  for (int j = 0; j < n; ++j) m(image[j], j) = ScalarTraits<T>::one();
  return m;
}

template <class T>
DenseMatrix<T> diagonal(const std::vector<long>& d) {
  const int n = static_cast<int>(d.size());
  DenseMatrix<T> m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = ScalarTraits<T>::from_long(d[i]);
  return m;
}

GroupSpec finish(std::string name, GroundField field, const std::vector<ExactMatrix>& gens) {
  return make_exact_spec(std::move(name), field, gens);
}

GroupSpec finish(std::string name, GroundField, const std::vector<DenseMatrix<double>>& gens) {
  std::vector<Eigen::MatrixXd> out;
  for (const auto& g : gens) {
    Eigen::MatrixXd m(g.rows(), g.cols());
    for (int i = 0; i < g.rows(); ++i)
      for (int j = 0; j < g.cols(); ++j) m(i, j) = g(i, j);
    out.push_back(m);
  }
  return make_float_spec(std::move(name), std::move(out));
}

struct PolygonTrig {
  bool exact = false;
  GroundField field{FieldKind::floating, 0};
  Q c, s;  // cos, sin of 2 pi / n
  double cd = 0, sd = 0;
};

PolygonTrig polygon_trig(int n) {
  PolygonTrig t;
  const double angle = 2.0 * std::numbers::pi / n;
  t.cd = std::cos(angle);
  t.sd = std::sin(angle);
  t.exact = true;
  switch (n) {
    case 1: t.c = rat(1); t.s = rat(0); t.field = {FieldKind::rational, 0}; break;
    case 2: t.c = rat(-1); t.s = rat(0); t.field = {FieldKind::rational, 0}; break;
    case 4: t.c = rat(0); t.s = rat(1); t.field = {FieldKind::rational, 0}; break;
    case 3: t.c = rat(-1, 2); t.s = surd(1, 2, 3); t.field = {FieldKind::quadratic, 3}; break;
    case 6: t.c = rat(1, 2); t.s = surd(1, 2, 3); t.field = {FieldKind::quadratic, 3}; break;
    case 12: t.c = surd(1, 2, 3); t.s = rat(1, 2); t.field = {FieldKind::quadratic, 3}; break;
    case 8: t.c = surd(1, 2, 2); t.s = surd(1, 2, 2); t.field = {FieldKind::quadratic, 2}; break;
    default: t.exact = false; break;
  }
  return t;
}

template <class T>
std::vector<DenseMatrix<T>> polygon_generators(const T& c, const T& s, int dim, bool rotation_only, bool extend_minus) {
  const T zero = ScalarTraits<T>::zero();
  const T one = ScalarTraits<T>::one();
  DenseMatrix<T> rot = DenseMatrix<T>::identity(dim);
  rot(0, 0) = c; rot(0, 1) = -s; rot(1, 0) = s; rot(1, 1) = c;
  if (rotation_only) return {rot};
  DenseMatrix<T> refl = DenseMatrix<T>::identity(dim);
  refl(1, 1) = -one;
  if (dim == 3 && extend_minus) refl(2, 2) = -one;
  if (dim == 2) {
    DenseMatrix<T> refl2(2, 2);
    refl2(0, 0) = c; refl2(0, 1) = s; refl2(1, 0) = s; refl2(1, 1) = -c;
    (void)zero;
    return {refl, refl2};
  }
  return {rot, refl};
}

GroupSpec polygon_family(const std::string& name, int n, int dim, bool rotation_only, bool extend_minus) {
  const PolygonTrig t = polygon_trig(n);
  if (t.exact) return finish(name, t.field, polygon_generators<Q>(t.c, t.s, dim, rotation_only, extend_minus));
  return finish(name, t.field, polygon_generators<double>(t.cd, t.sd, dim, rotation_only, extend_minus));
}

std::vector<ExactMatrix> h3_reflections() {
  const Q a = surd(1, 4, 5) - rat(1, 4);  // (sqrt5 - 1) / 4
  const Q b = surd(1, 4, 5) + rat(1, 4);  // (sqrt5 + 1) / 4
  return {reflection<Q>({rat(0), rat(1), rat(0)}), reflection<Q>({-a, -b, rat(1, 2)}),
          reflection<Q>({rat(0), rat(0), rat(-1)})};
}

std::vector<ExactMatrix> h4_reflections() {
  const Q a = surd(1, 4, 5) - rat(1, 4);
  const Q b = surd(1, 4, 5) + rat(1, 4);
  return {reflection<Q>({rat(1), rat(0), rat(0), rat(0)}), reflection<Q>({-b, rat(1, 2), -a, rat(0)}),
          reflection<Q>({rat(0), rat(-1, 2), b, -a}), reflection<Q>({rat(0), rat(-1, 2), -b, a})};
}

GroupSpec symmetric_family(int n) {
  std::vector<ExactMatrix> gens;
  for (int i = 0; i + 1 < n; ++i) {
    std::vector<int> image(n);
    for (int j = 0; j < n; ++j) image[j] = j;
    std::swap(image[i], image[i + 1]);
    gens.push_back(permutation<Q>(image));
  }
  if (gens.empty()) gens.push_back(ExactMatrix::identity(n));
  return finish("S" + std::to_string(n), {FieldKind::rational, 0}, gens);
}

GroupSpec a_family(int n) {
  const std::string name = "A" + std::to_string(n);
  if (n == 1) return finish(name, {FieldKind::rational, 0}, std::vector<ExactMatrix>{diagonal<Q>({-1})});
  if (n == 2) {
    auto spec = polygon_family(name, 3, 2, false, false);
    return spec;
  }
  if (n == 3) {
    return finish(name, {FieldKind::rational, 0},
                  std::vector<ExactMatrix>{reflection<Q>({rat(1), rat(-1), rat(0)}),
                                           reflection<Q>({rat(0), rat(1), rat(-1)}),
                                           reflection<Q>({rat(0), rat(1), rat(1)})});
  }
  // Helmert basis of the sum-zero hyperplane in R^{n+1}.
  const int m = n + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, m);
  for (int i = 0; i < n; ++i) {
    const double k = i + 1;
    for (int j = 0; j <= i; ++j) h(i, j) = 1.0 / std::sqrt(k * (k + 1));
    h(i, i + 1) = -k / std::sqrt(k * (k + 1));
  }
  std::vector<Eigen::MatrixXd> gens;
  for (int i = 0; i + 1 < m; ++i) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(m, m);
    p.row(i).swap(p.row(i + 1));
    gens.push_back(h * p * h.transpose());
  }
  return make_float_spec(name, std::move(gens));
}

GroupSpec bd_family(int n, bool type_d) {
  std::vector<ExactMatrix> gens;
  for (int i = 0; i + 1 < n; ++i) {
    std::vector<Q> r(n, rat(0));
    r[i] = rat(1);
    r[i + 1] = rat(-1);
    gens.push_back(reflection<Q>(r));
  }
  std::vector<Q> r(n, rat(0));
  if (type_d) {
    r[n - 2] = rat(1);
    r[n - 1] = rat(1);
  } else {
    r[n - 1] = rat(1);
  }
  gens.push_back(reflection<Q>(r));
  return finish((type_d ? "D" : "B") + std::to_string(n), {FieldKind::rational, 0}, gens);
}

int require_n(const std::string& family, const CatalogParams& p, int min_n) {
  if (p.n < min_n) fail(ErrorKind::bad_params, family + " requires n >= " + std::to_string(min_n));
  return p.n;
}

}  // namespace

std::vector<std::string> catalog_families() {
  return {"Sn", "An", "Bn", "Dn", "I2n", "G2", "H3", "F4", "H4", "C2n", "C3n", "I3n", "T", "W", "H", "trivial"};
}

GroupSpec catalog(const std::string& family, const CatalogParams& params) {
  const GroundField rational{FieldKind::rational, 0};
  const GroundField sqrt5{FieldKind::quadratic, 5};
  GroupSpec spec;
  if (family == "trivial") {
    const int dim = params.dim > 0 ? params.dim : (params.n > 0 ? params.n : 1);
    spec = finish("trivial", rational, std::vector<ExactMatrix>{ExactMatrix::identity(dim)});
  } else if (family == "Sn") {
    spec = symmetric_family(require_n(family, params, 1));
  } else if (family == "An") {
    spec = a_family(require_n(family, params, 1));
  } else if (family == "Bn") {
    spec = bd_family(require_n(family, params, 2), false);
  } else if (family == "Dn") {
    spec = bd_family(require_n(family, params, 4), true);
  } else if (family == "I2n") {
    const int n = require_n(family, params, 1);
    if (params.strict && (n < 5 || n == 6))
      fail(ErrorKind::bad_params, "I2n in strict mode requires n >= 5 and n != 6 (use G2)");
    if (n == 6) return catalog("G2", params);
    spec = polygon_family("I2_" + std::to_string(n), n, 2, false, false);
  } else if (family == "G2") {
    spec = polygon_family("G2", 6, 2, false, false);
  } else if (family == "H3") {
    spec = finish("H3", sqrt5, h3_reflections());
  } else if (family == "H4") {
    spec = finish("H4", sqrt5, h4_reflections());
  } else if (family == "F4") {
    spec = finish("F4", rational,
                  std::vector<ExactMatrix>{reflection<Q>({rat(0), rat(1), rat(-1), rat(0)}),
                                           reflection<Q>({rat(0), rat(0), rat(1), rat(-1)}),
                                           reflection<Q>({rat(0), rat(0), rat(0), rat(1)}),
                                           reflection<Q>({rat(1, 2), rat(-1, 2), rat(-1, 2), rat(-1, 2)})});
  } else if (family == "C2n") {
    const int n = require_n(family, params, 1);
    spec = polygon_family("C2_" + std::to_string(n), n, 2, true, false);
  } else if (family == "C3n") {
    const int n = require_n(family, params, 1);
    spec = polygon_family("C3_" + std::to_string(n), n, 3, true, false);
  } else if (family == "I3n") {
    const int n = require_n(family, params, 2);
    spec = polygon_family("I3_" + std::to_string(n), n, 3, false, true);
  } else if (family == "T") {
    spec = finish("T", rational,
                  std::vector<ExactMatrix>{permutation<Q>({1, 2, 0}), diagonal<Q>({1, -1, -1})});
  } else if (family == "W") {
    ExactMatrix quarter(3, 3);
    quarter(0, 1) = rat(-1);
    quarter(1, 0) = rat(1);
    quarter(2, 2) = rat(1);
    spec = finish("W", rational, std::vector<ExactMatrix>{quarter, permutation<Q>({1, 2, 0})});
  } else if (family == "H") {
    auto s = h3_reflections();
    spec = finish("H", sqrt5, std::vector<ExactMatrix>{s[0] * s[1], s[1] * s[2]});
  } else {
    fail(ErrorKind::unknown_family, "unknown family '" + family + "'");
  }
  spec.table_entry = published_entry(family, params.n);
  return spec;
}

std::optional<TableEntry> published_entry(const std::string& family, int n) {
  auto factorial = [](int m) {
    std::uint64_t f = 1;
    for (int i = 2; i <= m; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
  };
  const auto un = static_cast<std::uint64_t>(n);
  if (family == "An" && n >= 1) return TableEntry{n + 1, n + 1, factorial(n + 1)};
  if (family == "Bn" && n >= 2) return TableEntry{2 * n, 2 * n, (std::uint64_t{1} << n) * factorial(n)};
  if (family == "Dn" && n >= 4) return TableEntry{2 * n - 2, 2 * n, (std::uint64_t{1} << (n - 1)) * factorial(n)};
  if (family == "I2n" && n >= 1) {
    if (n == 6) return TableEntry{6, 6, 12};
    return TableEntry{n, n, 2 * un};
  }
  if (family == "G2") return TableEntry{6, 6, 12};
  if (family == "H3") return TableEntry{10, 12, 120};
  if (family == "H4") return TableEntry{30, 120, 14400};
  if (family == "F4") return TableEntry{12, 24, 1152};
  if (family == "E6") return TableEntry{12, 27, 51840};
  if (family == "E7") return TableEntry{18, 56, 2903040};
  if (family == "E8") return TableEntry{30, 240, 696729600};
  if ((family == "C2n" || family == "C3n") && n >= 1) return TableEntry{n, n, un};
  if (family == "I3n" && n >= 2) return TableEntry{n, n, 2 * un};
  if (family == "T") return TableEntry{6, 6, 12};
  if (family == "W") return TableEntry{9, 9, 24};
  if (family == "H") return TableEntry{15, 15, 60};
  return std::nullopt;
}

std::optional<int> known_degree(const std::string& family, int n) {
  if (const auto e = published_entry(family, n)) return e->d;
  if (family == "Sn" && n >= 1) return n;
  if (family == "trivial") return 1;
  return std::nullopt;
}

}  // namespace orbitlift
