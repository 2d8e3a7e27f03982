#include "orbitlift/number.hpp"

#include <algorithm>
#include <cctype>

#include "orbitlift/error.hpp"

namespace orbitlift {

QuadraticNumber::QuadraticNumber(mpq_class a, mpq_class b, long radicand)
    : a_(std::move(a)), b_(std::move(b)), d_(radicand) {
  if (sgn(b_) != 0 && d_ <= 1) fail(ErrorKind::invalid_argument, "radicand must be a non-square integer > 1");
  normalize();
}

QuadraticNumber QuadraticNumber::sqrt_of(long radicand) { return QuadraticNumber(mpq_class(0), mpq_class(1), radicand); }

void QuadraticNumber::normalize() {
  a_.canonicalize();
  b_.canonicalize();
  if (sgn(b_) == 0) d_ = 0;
}

long QuadraticNumber::merge_radicand(const QuadraticNumber& o) const {
  if (sgn(b_) == 0) return o.d_;
  if (sgn(o.b_) == 0) return d_;
  if (d_ != o.d_) fail(ErrorKind::invalid_argument, "mixed quadratic fields");
  return d_;
}

QuadraticNumber& QuadraticNumber::operator+=(const QuadraticNumber& o) {
  const long d = merge_radicand(o);
  a_ += o.a_;
  b_ += o.b_;
  d_ = sgn(b_) == 0 ? 0 : d;
  return *this;
}

QuadraticNumber& QuadraticNumber::operator-=(const QuadraticNumber& o) {
  const long d = merge_radicand(o);
  a_ -= o.a_;
  b_ -= o.b_;
  d_ = sgn(b_) == 0 ? 0 : d;
  return *this;
}

QuadraticNumber& QuadraticNumber::operator*=(const QuadraticNumber& o) {
  const long d = merge_radicand(o);
  if (sgn(b_) == 0 && sgn(o.b_) == 0) {
    a_ *= o.a_;
    return *this;
  }
  mpq_class na = a_ * o.a_ + b_ * o.b_ * d;
  mpq_class nb = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(na);
  b_ = std::move(nb);
  d_ = sgn(b_) == 0 ? 0 : d;
  return *this;
}

QuadraticNumber& QuadraticNumber::operator/=(const QuadraticNumber& o) {
  if (o.is_zero()) fail(ErrorKind::invalid_argument, "division by zero");
  if (sgn(o.b_) == 0) {
    a_ /= o.a_;
    b_ /= o.a_;
    return *this;
  }
  const long d = merge_radicand(o);
  mpq_class den = o.a_ * o.a_ - o.b_ * o.b_ * d;
  QuadraticNumber conj(o.a_, -o.b_, d);
  *this *= conj;
  a_ /= den;
  b_ /= den;
  d_ = sgn(b_) == 0 ? 0 : d;
  return *this;
}

QuadraticNumber QuadraticNumber::operator-() const {
  QuadraticNumber r = *this;
  r.a_ = -r.a_;
  r.b_ = -r.b_;
  return r;
}

int QuadraticNumber::sign() const {
  const int sa = sgn(a_);
  const int sb = sgn(b_);
  if (sb == 0) return sa;
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  mpq_class a2 = a_ * a_;
  mpq_class b2 = b_ * b_ * d_;
  const int c = cmp(a2, b2);
  if (c == 0) return 0;
  return c > 0 ? sa : sb;
}

double QuadraticNumber::to_double() const {
  if (sgn(b_) == 0) return a_.get_d();
  return a_.get_d() + b_.get_d() * std::sqrt(static_cast<double>(d_));
}

std::string QuadraticNumber::to_string() const {
  if (sgn(b_) == 0) return a_.get_str();
  std::string s;
  if (sgn(a_) != 0) s = a_.get_str() + (sgn(b_) > 0 ? "+" : "");
  return s + b_.get_str() + "*sqrt(" + std::to_string(d_) + ")";
}

std::size_t QuadraticNumber::bit_size() const {
  auto bits = [](const mpq_class& q) {
    return std::max(mpz_sizeinbase(q.get_num_mpz_t(), 2), mpz_sizeinbase(q.get_den_mpz_t(), 2));
  };
  return std::max(bits(a_), bits(b_));
}

QuadraticNumber QuadraticNumber::parse(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s.empty()) fail(ErrorKind::parse_error, "empty number");
  if (s.find('/') != std::string::npos) {
    mpq_class q;
    if (q.set_str(s, 10) != 0) fail(ErrorKind::parse_error, "bad rational '" + s + "'");
    q.canonicalize();
    if (sgn(q.get_den()) == 0) fail(ErrorKind::parse_error, "zero denominator in '" + s + "'");
    return QuadraticNumber(q);
  }
  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  std::string digits;
  long scale = 0;
  bool seen_dot = false;
  bool any_digit = false;
  for (; pos < s.size(); ++pos) {
    const char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      any_digit = true;
      if (seen_dot) ++scale;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (!any_digit) fail(ErrorKind::parse_error, "bad number '" + s + "'");
  long exponent = 0;
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') fail(ErrorKind::parse_error, "bad number '" + s + "'");
    try {
      std::size_t used = 0;
      exponent = std::stol(s.substr(pos + 1), &used);
      if (pos + 1 + used != s.size()) fail(ErrorKind::parse_error, "bad exponent in '" + s + "'");
    } catch (const std::logic_error&) {
      fail(ErrorKind::parse_error, "bad exponent in '" + s + "'");
    }
  }
  mpz_class num(digits, 10);
  if (negative) num = -num;
  const long shift = exponent - scale;
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(shift >= 0 ? shift : -shift));
  mpq_class q = shift >= 0 ? mpq_class(num * pow10) : mpq_class(num, pow10);
  q.canonicalize();
  return QuadraticNumber(q);
}

std::string format_double(double x) {
  if (x == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace orbitlift
