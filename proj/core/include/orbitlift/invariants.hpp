#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

#include "orbitlift/grouprep.hpp"
#include "orbitlift/poly.hpp"

namespace orbitlift {

struct RankCertificate {
  int degree = 0;
  std::size_t invariant_dim = 0;     // dim R_e
  std::size_t decomposable_dim = 0;  // dim of products of lower generators in degree e
  std::size_t new_generators = 0;
  double min_accepted_ratio = 1.0;  // floating path only
  double max_rejected_ratio = 0.0;
};

template <class T>
struct GeneratorSystem {
  int nvars = 0;
  std::vector<Poly<T>> generators;
  std::vector<int> degrees;
  std::optional<std::size_t> norm_index;  // position of |x|^2 when it is a generator
  bool minimal = true;
  std::vector<RankCertificate> certificate;

  std::size_t size() const { return generators.size(); }
  int d() const {
    int d = 0;
    for (int e : degrees) d = std::max(d, e);
    return d;
  }
};

GeneratorSystem<double> to_double(const GeneratorSystem<QuadraticNumber>& s);

struct InvariantOptions {
  int cap = 0;  // maximal degree searched
  std::optional<MonomialOrder> order;
  bool check_separation = true;
  std::uint64_t seed = 7;
  double rank_tol = 1e-8;
  std::size_t bit_bound = 1u << 15;  // FieldOverflow threshold for exact coefficients
};

// Exact generators (when the group has an exact field) plus the double
// version used by all numerical code.
struct InvariantSystem {
  GroundField field;
  std::optional<GeneratorSystem<QuadraticNumber>> exact;
  GeneratorSystem<double> numeric;

  int d() const { return numeric.d(); }
  std::vector<int> degrees() const { return numeric.degrees; }
};

InvariantSystem generate_invariants(const FiniteGroup& group, const InvariantOptions& options);

int compute_d(const InvariantSystem& system);

// Average of p over the group. Exact polynomials need an exact group.
Poly<QuadraticNumber> reynolds(const FiniteGroup& group, const Poly<QuadraticNumber>& p);
Poly<double> reynolds(const FiniteGroup& group, const Poly<double>& p);

bool is_invariant(const FiniteGroup& group, const Poly<QuadraticNumber>& p);
bool is_invariant(const FiniteGroup& group, const Poly<double>& p, double tol = 1e-9);

// Writes an invariant polynomial as q(sigma_1, ..., sigma_n). Columns are the
// generator monomials in ascending graded order; free variables are zero.
template <class T>
Poly<T> express_in_generators(const Poly<T>& p, const GeneratorSystem<T>& system, double tol = 1e-8);

// Expressions of each generator of `to` in the generators of `from`.
template <class T>
std::vector<Poly<T>> change_of_generators(const GeneratorSystem<T>& from, const GeneratorSystem<T>& to,
                                          double tol = 1e-8);

// Restricts a system to a G-stable subspace with orthonormal basis columns W.
GeneratorSystem<double> restrict_to_subspace(const GeneratorSystem<double>& system, const FiniteGroup& group,
                                             const Eigen::MatrixXd& basis, double tol = 1e-9);

// System for the product action on V1 + V2 (variables of V1 first); the two
// norm squares stay separate generators.
GeneratorSystem<double> direct_sum_system(const GeneratorSystem<double>& a, const GeneratorSystem<double>& b);

// Weighted-degree exponent vectors b with sum b_i * degrees_i == e, ascending.
std::vector<Exponent> weighted_exponents(const std::vector<int>& degrees, int e);

}  // namespace orbitlift
