#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "orbitlift/number.hpp"

namespace orbitlift {

// Incremental row basis. Exact scalars use Gaussian elimination in insertion
// order; doubles use twice-iterated modified Gram-Schmidt with a relative
// independence threshold.
template <class T>
class Echelon {
 public:
  struct Reduction {
    std::vector<T> residual;
    std::vector<T> coefficients;  // over accepted vectors, in acceptance order
    bool in_span = false;
  };

  explicit Echelon(std::size_t dim, double tol = 1e-8) : dim_(dim), tol_(tol) {}

  // Vectors whose residual falls below tol * reference count as dependent
  // regardless of their own norm (floating path).
  void set_reference(double reference) { reference_ = reference; }

  std::size_t dim() const { return dim_; }
  std::size_t rank() const { return rows_.size(); }

  // Smallest residual ratio among accepted vectors and largest among rejected
  // ones (floating path); the gap certifies the rank decisions.
  double min_accepted_ratio() const { return min_accepted_; }
  double max_rejected_ratio() const { return max_rejected_; }

  Reduction reduce(const std::vector<T>& v) const {
    Reduction r;
    r.residual = v;
    std::vector<T> f(rows_.size(), ScalarTraits<T>::zero());
    if constexpr (ScalarTraits<T>::exact) {
      for (std::size_t k = 0; k < rows_.size(); ++k) {
        const T c = r.residual[pivots_[k]];
        if (ScalarTraits<T>::is_zero(c)) continue;
        f[k] = c;
        const auto& row = rows_[k];
        for (std::size_t i = pivots_[k]; i < dim_; ++i)
          if (!ScalarTraits<T>::is_zero(row[i])) r.residual[i] -= c * row[i];
      }
      r.in_span = std::all_of(r.residual.begin(), r.residual.end(), [](const T& x) { return ScalarTraits<T>::is_zero(x); });
    } else {
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t k = 0; k < rows_.size(); ++k) {
          double c = 0.0;
          for (std::size_t i = 0; i < dim_; ++i) c += r.residual[i] * rows_[k][i];
          f[k] += c;
          for (std::size_t i = 0; i < dim_; ++i) r.residual[i] -= c * rows_[k][i];
        }
      const double vn = norm(v);
      r.in_span = norm(r.residual) <= tol_ * std::max({vn, reference_, std::numeric_limits<double>::min()});
    }
    r.coefficients.assign(accepted_, ScalarTraits<T>::zero());
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      if (ScalarTraits<T>::is_zero(f[k])) continue;
      for (std::size_t j = 0; j < accepted_; ++j)
        if (!ScalarTraits<T>::is_zero(combos_[k][j])) r.coefficients[j] += f[k] * combos_[k][j];
    }
    return r;
  }

  // Adds v when independent; returns whether it was accepted.
  bool add(const std::vector<T>& v) {
    Reduction r = reduce(v);
    if constexpr (!ScalarTraits<T>::exact) {
      const double vn = norm(v);
      const double ratio = vn > 0 ? norm(r.residual) / vn : 0.0;
      if (r.in_span) {
        max_rejected_ = std::max(max_rejected_, ratio);
        return false;
      }
      min_accepted_ = std::min(min_accepted_, ratio);
    } else if (r.in_span) {
      return false;
    }
    // row = (v - sum f_k row_k) / s, expressed over accepted vectors
    for (auto& combo : combos_) combo.push_back(ScalarTraits<T>::zero());
    std::vector<T> combo(accepted_ + 1, ScalarTraits<T>::zero());
    for (std::size_t j = 0; j < accepted_; ++j) combo[j] = -r.coefficients[j];
    combo[accepted_] = ScalarTraits<T>::one();
    T s;
    std::size_t pivot = 0;
    if constexpr (ScalarTraits<T>::exact) {
      while (ScalarTraits<T>::is_zero(r.residual[pivot])) ++pivot;
      s = r.residual[pivot];
    } else {
      s = norm(r.residual);
      pivot = rows_.size();
    }
    for (auto& x : r.residual)
      if (!ScalarTraits<T>::is_zero(x)) x /= s;
    for (auto& c : combo)
      if (!ScalarTraits<T>::is_zero(c)) c /= s;
    rows_.push_back(std::move(r.residual));
    pivots_.push_back(pivot);
    combos_.push_back(std::move(combo));
    ++accepted_;
    return true;
  }

 private:
  static double norm(const std::vector<T>& v) {
    double s = 0.0;
    for (const auto& x : v) s += ScalarTraits<T>::to_double(x) * ScalarTraits<T>::to_double(x);
    return std::sqrt(s);
  }

  std::size_t dim_;
  double tol_;
  double reference_ = 0.0;
  std::vector<std::vector<T>> rows_;
  std::vector<std::size_t> pivots_;
  std::vector<std::vector<T>> combos_;
  std::size_t accepted_ = 0;
  double min_accepted_ = std::numeric_limits<double>::infinity();
  double max_rejected_ = 0.0;
};

}  // namespace orbitlift
