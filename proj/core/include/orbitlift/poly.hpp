#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "orbitlift/error.hpp"
#include "orbitlift/number.hpp"

namespace orbitlift {

using Exponent = std::vector<std::uint8_t>;

inline int total_degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }

// Graded order: lower degree first; within a degree, x1 is the most
// significant variable (x1^2 > x1 x2 > x2^2), so ascending order lists x2^2
// before x1^2.
struct GradedLexLess {
  bool operator()(const Exponent& a, const Exponent& b) const {
    const int da = total_degree(a);
    const int db = total_degree(b);
    if (da != db) return da < db;
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
  }
};

// Alternative monomial orders for stability checks: a variable priority
// permutation and a choice between lex and reverse-lex tie breaking.
struct MonomialOrder {
  std::vector<int> priority;  // priority[0] is the most significant variable
  bool reverse = false;

  static MonomialOrder standard(int nvars) {
    MonomialOrder o;
    o.priority.resize(nvars);
    std::iota(o.priority.begin(), o.priority.end(), 0);
    return o;
  }

  bool less(const Exponent& a, const Exponent& b) const {
    const int da = total_degree(a);
    const int db = total_degree(b);
    if (da != db) return da < db;
    if (!reverse) {
      for (int v : priority)
        if (a[v] != b[v]) return a[v] < b[v];
    } else {
      for (auto it = priority.rbegin(); it != priority.rend(); ++it)
        if (a[*it] != b[*it]) return a[*it] > b[*it];
    }
    return false;
  }
};

template <class T>
class Poly {
 public:
  using Terms = std::map<Exponent, T, GradedLexLess>;

  explicit Poly(int nvars = 0) : nvars_(nvars) {}

  static Poly constant(int nvars, const T& c) {
    Poly p(nvars);
    p.add_term(Exponent(nvars, 0), c);
    return p;
  }
  static Poly variable(int nvars, int i) {
    Exponent e(nvars, 0);
    e[i] = 1;
    return monomial(e, ScalarTraits<T>::one());
  }
  static Poly monomial(const Exponent& e, const T& c) {
    Poly p(static_cast<int>(e.size()));
    p.add_term(e, c);
    return p;
  }
  static Poly norm_square(int nvars) {
    Poly p(nvars);
    for (int i = 0; i < nvars; ++i) {
      Exponent e(nvars, 0);
      e[i] = 2;
      p.add_term(e, ScalarTraits<T>::one());
    }
    return p;
  }

  int nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  int degree() const { return terms_.empty() ? -1 : total_degree(terms_.rbegin()->first); }
  int min_degree() const { return terms_.empty() ? -1 : total_degree(terms_.begin()->first); }
  bool is_homogeneous() const { return terms_.empty() || degree() == min_degree(); }

  // Largest monomial under the graded order.
  const std::pair<const Exponent, T>& leading() const { return *terms_.rbegin(); }

  T coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? ScalarTraits<T>::zero() : it->second;
  }

  void add_term(const Exponent& e, const T& c) {
    if (ScalarTraits<T>::is_zero(c)) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (ScalarTraits<T>::is_zero(it->second)) terms_.erase(it);
    }
  }

  Poly homogeneous_part(int e) const {
    Poly r(nvars_);
    for (const auto& [m, c] : terms_)
      if (total_degree(m) == e) r.terms_.emplace(m, c);
    return r;
  }

  Poly& operator+=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Poly& operator*=(const T& s) {
    if (ScalarTraits<T>::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, const T& s) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly r(a.nvars_);
    Exponent e(a.nvars_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        for (int i = 0; i < a.nvars_; ++i) e[i] = static_cast<std::uint8_t>(ma[i] + mb[i]);
        r.add_term(e, ca * cb);
      }
    return r;
  }
  friend bool operator==(const Poly& a, const Poly& b) { return a.nvars_ == b.nvars_ && a.terms_ == b.terms_; }

  Poly pow(int k) const {
    Poly r = constant(nvars_, ScalarTraits<T>::one());
    Poly base = *this;
    while (k > 0) {
      if (k & 1) r = r * base;
      k >>= 1;
      if (k) base = base * base;
    }
    return r;
  }

  // Substitutes x_j -> subs[j]; all substitutes share one variable count.
  Poly compose(const std::vector<Poly>& subs) const {
    const int out_vars = subs.empty() ? 0 : subs.front().nvars();
    Poly r(out_vars);
    std::vector<std::vector<Poly>> powers(nvars_);
    for (const auto& [m, c] : terms_) {
      Poly term = constant(out_vars, c);
      for (int j = 0; j < nvars_; ++j) {
        if (m[j] == 0) continue;
        auto& pw = powers[j];
        if (pw.empty()) pw.push_back(constant(out_vars, ScalarTraits<T>::one()));
        while (static_cast<int>(pw.size()) <= m[j]) pw.push_back(pw.back() * subs[j]);
        term = term * pw[m[j]];
      }
      r += term;
    }
    return r;
  }

  T evaluate(const std::vector<T>& x) const {
    T acc = ScalarTraits<T>::zero();
    for (const auto& [m, c] : terms_) {
      T term = c;
      for (int j = 0; j < nvars_; ++j)
        for (int k = 0; k < m[j]; ++k) term *= x[j];
      acc += term;
    }
    return acc;
  }

  double evaluate(const Eigen::VectorXd& x) const {
    double acc = 0.0;
    for (const auto& [m, c] : terms_) {
      double term = ScalarTraits<T>::to_double(c);
      for (int j = 0; j < nvars_; ++j)
        if (m[j]) term *= std::pow(x(j), m[j]);
      acc += term;
    }
    return acc;
  }

  Poly<double> to_double() const {
    Poly<double> r(nvars_);
    for (const auto& [m, c] : terms_) r.add_term(m, ScalarTraits<T>::to_double(c));
    return r;
  }

  // Drops coefficients below rel * max |coefficient| (floating path only).
  void prune(double rel) {
    double mx = 0.0;
    for (const auto& [m, c] : terms_) mx = std::max(mx, ScalarTraits<T>::magnitude(c));
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (ScalarTraits<T>::magnitude(it->second) <= rel * mx)
        it = terms_.erase(it);
      else
        ++it;
    }
  }

  double max_abs_coefficient() const {
    double mx = 0.0;
    for (const auto& [m, c] : terms_) mx = std::max(mx, ScalarTraits<T>::magnitude(c));
    return mx;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      if (!s.empty()) s += " + ";
      s += "(" + ScalarTraits<T>::to_string(it->second) + ")";
      for (int j = 0; j < nvars_; ++j) {
        if (it->first[j] == 0) continue;
        s += "*x" + std::to_string(j + 1);
        if (it->first[j] > 1) s += "^" + std::to_string(it->first[j]);
      }
    }
    return s;
  }

 private:
  int nvars_ = 0;
  Terms terms_;
};

template <class T>
Poly<T> linear_substitution(const Poly<T>& p, const DenseMatrix<T>& g) {
  const int n = p.nvars();
  std::vector<Poly<T>> subs;
  for (int j = 0; j < n; ++j) {
    Poly<T> l(n);
    for (int k = 0; k < n; ++k) {
      Exponent e(n, 0);
      e[k] = 1;
      l.add_term(e, g(j, k));
    }
    subs.push_back(l);
  }
  return p.compose(subs);
}

inline Poly<double> linear_substitution(const Poly<double>& p, const Eigen::MatrixXd& g) {
  const int n = static_cast<int>(g.cols());
  std::vector<Poly<double>> subs;
  for (int j = 0; j < p.nvars(); ++j) {
    Poly<double> l(n);
    for (int k = 0; k < n; ++k) {
      Exponent e(n, 0);
      e[k] = 1;
      l.add_term(e, g(j, k));
    }
    subs.push_back(l);
  }
  return p.compose(subs);
}

// All exponents of a fixed degree, sorted ascending by an order.
class MonomialBasis {
 public:
  MonomialBasis(int nvars, int degree, const MonomialOrder& order);
  MonomialBasis(int nvars, int degree) : MonomialBasis(nvars, degree, MonomialOrder::standard(nvars)) {}

  int nvars() const { return nvars_; }
  int degree() const { return degree_; }
  std::size_t size() const { return monomials_.size(); }
  const Exponent& operator[](std::size_t i) const { return monomials_[i]; }
  const std::vector<Exponent>& monomials() const { return monomials_; }
  std::size_t index(const Exponent& e) const;

 private:
  int nvars_;
  int degree_;
  std::vector<Exponent> monomials_;
  std::map<Exponent, std::size_t> index_;
};

std::vector<Exponent> exponents_of_degree(int nvars, int degree);

template <class T>
std::vector<T> to_dense(const Poly<T>& p, const MonomialBasis& basis) {
  std::vector<T> v(basis.size(), ScalarTraits<T>::zero());
  for (const auto& [m, c] : p.terms()) {
    if (total_degree(m) != basis.degree()) fail(ErrorKind::invalid_argument, "polynomial is not homogeneous of the basis degree");
    v[basis.index(m)] = c;
  }
  return v;
}

template <class T>
Poly<T> from_dense(const std::vector<T>& v, const MonomialBasis& basis) {
  Poly<T> p(basis.nvars());
  for (std::size_t i = 0; i < v.size(); ++i) p.add_term(basis[i], v[i]);
  return p;
}

}  // namespace orbitlift
