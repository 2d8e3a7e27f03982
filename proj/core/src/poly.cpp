#include "orbitlift/poly.hpp"

namespace orbitlift {

namespace {

void fill_exponents(int var, int remaining, Exponent& cur, std::vector<Exponent>& out) {
  const int n = static_cast<int>(cur.size());
  if (var == n - 1) {
    cur[var] = static_cast<std::uint8_t>(remaining);
    out.push_back(cur);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    cur[var] = static_cast<std::uint8_t>(k);
    fill_exponents(var + 1, remaining - k, cur, out);
  }
  cur[var] = 0;
}

}  // namespace

std::vector<Exponent> exponents_of_degree(int nvars, int degree) {
  std::vector<Exponent> out;
  if (nvars == 0) {
    if (degree == 0) out.emplace_back();
    return out;
  }
  Exponent cur(nvars, 0);
  fill_exponents(0, degree, cur, out);
  return out;
}

MonomialBasis::MonomialBasis(int nvars, int degree, const MonomialOrder& order)
    : nvars_(nvars), degree_(degree), monomials_(exponents_of_degree(nvars, degree)) {
  std::sort(monomials_.begin(), monomials_.end(),
            [&](const Exponent& a, const Exponent& b) { return order.less(a, b); });
  for (std::size_t i = 0; i < monomials_.size(); ++i) index_.emplace(monomials_[i], i);
}

std::size_t MonomialBasis::index(const Exponent& e) const {
  auto it = index_.find(e);
  if (it == index_.end()) fail(ErrorKind::invalid_argument, "monomial not in basis");
  return it->second;
}

}  // namespace orbitlift
