#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orbitlift/number.hpp"

namespace orbitlift {

enum class FieldKind { rational, quadratic, floating };

struct GroundField {
  FieldKind kind = FieldKind::rational;
  long radicand = 0;

  bool exact() const { return kind != FieldKind::floating; }
  std::string label() const;
  static GroundField parse(const std::string& label);
};

// Reference values from the published tables (d, k, |G|).
struct TableEntry {
  int d = 0;
  int k = 0;
  std::uint64_t order = 0;
};

struct GroupSpec {
  std::string name;
  int dimension = 0;
  GroundField field;
  std::vector<ExactMatrix> exact_generators;  // populated for exact fields
  std::vector<Eigen::MatrixXd> generators;    // always populated
  std::optional<TableEntry> table_entry;
};

GroupSpec make_float_spec(std::string name, std::vector<Eigen::MatrixXd> generators);
GroupSpec make_exact_spec(std::string name, GroundField field, std::vector<ExactMatrix> generators);
Eigen::MatrixXd to_eigen(const ExactMatrix& m);

class FiniteGroup {
 public:
  FiniteGroup() = default;

  const std::string& name() const { return name_; }
  int dimension() const { return dimension_; }
  std::size_t order() const { return elements_.size(); }
  const GroundField& field() const { return field_; }
  bool has_exact() const { return !exact_elements_.empty(); }

  const Eigen::MatrixXd& element(std::size_t i) const { return elements_[i]; }
  const std::vector<Eigen::MatrixXd>& elements() const { return elements_; }
  const ExactMatrix& exact_element(std::size_t i) const { return exact_elements_[i]; }
  const std::vector<std::size_t>& generator_indices() const { return generator_indices_; }

  std::optional<std::size_t> index_of(const Eigen::MatrixXd& m, double tol = 1e-8) const;
  std::size_t product(std::size_t i, std::size_t j) const;
  std::size_t inverse(std::size_t i) const;

  // Elements listed by index; identity must be among them.
  FiniteGroup subgroup(std::span<const std::size_t> indices, const std::string& name) const;
  // Parent indices of a subgroup's elements (identity map for enumerated groups).
  const std::vector<std::size_t>& parent_indices() const { return parent_indices_; }

  friend FiniteGroup enumerate_group(const GroupSpec& spec, std::size_t cap);

 private:
  void build_lookup();

  std::string name_;
  int dimension_ = 0;
  GroundField field_;
  std::vector<Eigen::MatrixXd> elements_;
  std::vector<ExactMatrix> exact_elements_;
  std::vector<std::size_t> generator_indices_;
  std::vector<std::size_t> parent_indices_;
  std::multimap<std::uint64_t, std::size_t> lookup_;
};

// Breadth-first closure under right multiplication by generators.
// Canonical order: identity first, remaining elements sorted lexicographically
// by their entries rounded to 1e-9.
FiniteGroup enumerate_group(const GroupSpec& spec, std::size_t cap = 100000);

struct IsotropyData {
  Eigen::VectorXd base_point;
  std::vector<std::size_t> stabilizer;  // sorted element indices
  std::size_t index = 1;                // |G| / |G_v|
};

IsotropyData isotropy(const FiniteGroup& group, const Eigen::VectorXd& v, double tol = 1e-9);

// Orthonormal basis (columns) of the common fixed space.
Eigen::MatrixXd fixed_space(std::span<const Eigen::MatrixXd> elements, double tol = 1e-9);
Eigen::MatrixXd fixed_space(const FiniteGroup& group, double tol = 1e-9);

struct FixedSplit {
  Eigen::MatrixXd fixed;       // basis of V^G
  Eigen::MatrixXd complement;  // basis of V'
};

FixedSplit split_fixed(const FiniteGroup& group, double tol = 1e-9);

struct Decomposition {
  std::vector<Eigen::MatrixXd> components;  // orthonormal bases, irreducible and G-stable
  Eigen::MatrixXd fixed;                    // basis of V^G
  int attempts = 1;
};

Decomposition irreducible_decomposition(const FiniteGroup& group, double tol = 1e-8, std::uint64_t seed = 1);

// Orthonormal bases of all isotropy strata closures inside `subspace` (the
// subspace itself included), deduplicated, in discovery order.
std::vector<Eigen::MatrixXd> isotropy_strata(const FiniteGroup& group, const Eigen::MatrixXd& subspace,
                                             double tol = 1e-9);

std::vector<IsotropyData> max_isotropy_per_component(const FiniteGroup& group, const Decomposition& decomposition,
                                                     std::uint64_t seed = 1);

int compute_k(const FiniteGroup& group, const Decomposition& decomposition, int d, std::uint64_t seed = 1);

// Restriction of each element to an invariant subspace with orthonormal basis B.
std::vector<Eigen::MatrixXd> restrict_elements(const FiniteGroup& group, const Eigen::MatrixXd& basis);

}  // namespace orbitlift
