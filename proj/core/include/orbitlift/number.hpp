#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace orbitlift {

// a + b*sqrt(radicand) with rational a, b. Pure rationals carry b == 0 and
// radicand 0; mixing two irrational values requires equal radicands.
class QuadraticNumber {
 public:
  QuadraticNumber() = default;
  QuadraticNumber(long v) : a_(v) {}  // NOLINT(google-explicit-constructor)
  explicit QuadraticNumber(mpq_class a) : a_(std::move(a)) { a_.canonicalize(); }
  QuadraticNumber(mpq_class a, mpq_class b, long radicand);

  // Accepts "p/q", decimal strings such as "-0.125" or "1e-3".
  static QuadraticNumber parse(std::string_view text);
  static QuadraticNumber sqrt_of(long radicand);

  const mpq_class& rational_part() const { return a_; }
  const mpq_class& irrational_part() const { return b_; }
  long radicand() const { return d_; }

  bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
  bool is_rational() const { return sgn(b_) == 0; }
  int sign() const;
  double to_double() const;
  std::string to_string() const;
  std::size_t bit_size() const;

  QuadraticNumber& operator+=(const QuadraticNumber& o);
  QuadraticNumber& operator-=(const QuadraticNumber& o);
  QuadraticNumber& operator*=(const QuadraticNumber& o);
  QuadraticNumber& operator/=(const QuadraticNumber& o);
  QuadraticNumber operator-() const;

  friend QuadraticNumber operator+(QuadraticNumber x, const QuadraticNumber& y) { return x += y; }
  friend QuadraticNumber operator-(QuadraticNumber x, const QuadraticNumber& y) { return x -= y; }
  friend QuadraticNumber operator*(QuadraticNumber x, const QuadraticNumber& y) { return x *= y; }
  friend QuadraticNumber operator/(QuadraticNumber x, const QuadraticNumber& y) { return x /= y; }
  friend bool operator==(const QuadraticNumber& x, const QuadraticNumber& y) {
    return x.a_ == y.a_ && x.b_ == y.b_ && (sgn(x.b_) == 0 || x.d_ == y.d_);
  }
  friend bool operator!=(const QuadraticNumber& x, const QuadraticNumber& y) { return !(x == y); }

 private:
  long merge_radicand(const QuadraticNumber& o) const;
  void normalize();

  mpq_class a_{0};
  mpq_class b_{0};
  long d_ = 0;
};

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double from_long(long v) { return static_cast<double>(v); }
  static bool is_zero(double x) { return x == 0.0; }
  static double to_double(double x) { return x; }
  static double magnitude(double x) { return std::abs(x); }
  static std::string to_string(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }
};

template <>
struct ScalarTraits<QuadraticNumber> {
  static constexpr bool exact = true;
  static QuadraticNumber zero() { return QuadraticNumber(); }
  static QuadraticNumber one() { return QuadraticNumber(1); }
  static QuadraticNumber from_long(long v) { return QuadraticNumber(v); }
  static bool is_zero(const QuadraticNumber& x) { return x.is_zero(); }
  static double to_double(const QuadraticNumber& x) { return x.to_double(); }
  static double magnitude(const QuadraticNumber& x) { return std::abs(x.to_double()); }
  static std::string to_string(const QuadraticNumber& x) { return x.to_string(); }
};

std::string format_double(double x);

// Row-major dense matrix over an exact scalar type.
template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {}

  static DenseMatrix identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = ScalarTraits<T>::one();
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  T& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const T& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  DenseMatrix operator*(const DenseMatrix& o) const {
    DenseMatrix r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const T& a = (*this)(i, k);
        if (ScalarTraits<T>::is_zero(a)) continue;
        for (int j = 0; j < o.cols_; ++j) {
          if (ScalarTraits<T>::is_zero(o(k, j))) continue;
          r(i, j) += a * o(k, j);
        }
      }
    return r;
  }

  DenseMatrix transpose() const {
    DenseMatrix r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  friend bool operator==(const DenseMatrix& x, const DenseMatrix& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.data_ == y.data_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using ExactMatrix = DenseMatrix<QuadraticNumber>;

}  // namespace orbitlift
