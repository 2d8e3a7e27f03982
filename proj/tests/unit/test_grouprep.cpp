#include <gtest/gtest.h>

#include <random>
#include <set>

#include "orbitlift/catalog.hpp"
#include "orbitlift/error.hpp"
#include "orbitlift/grouprep.hpp"

using namespace orbitlift;

namespace {

FiniteGroup group_of(const std::string& family, int n = 0) { return enumerate_group(catalog(family, {n})); }

ExactMatrix permutation(const std::vector<int>& p) {
  const int n = static_cast<int>(p.size());
  ExactMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(p[i], i) = QuadraticNumber(1);
  return m;
}

std::size_t orbit_size(const FiniteGroup& g, const Eigen::VectorXd& v) {
  std::vector<Eigen::VectorXd> orbit;
  for (const auto& m : g.elements()) {
    const Eigen::VectorXd w = m * v;
    bool seen = false;
    for (const auto& o : orbit) seen = seen || (o - w).norm() < 1e-9;
    if (!seen) orbit.push_back(w);
  }
  return orbit.size();
}

}  // namespace

TEST(Enumerate, S3FromTranspositions) {
  const GroupSpec spec = make_exact_spec("S3", {}, {permutation({1, 0, 2}), permutation({0, 2, 1})});
  const FiniteGroup g = enumerate_group(spec);
  EXPECT_EQ(g.order(), 6u);
  EXPECT_TRUE(g.element(0).isIdentity());
}

TEST(Enumerate, CatalogOrders) {
  const std::vector<std::tuple<std::string, int, std::uint64_t>> rows = {
      {"An", 2, 6},     {"An", 3, 24},    {"Bn", 2, 8},     {"Bn", 3, 48},   {"Dn", 4, 192}, {"I2n", 5, 10},
      {"I2n", 7, 14},   {"I2n", 8, 16},   {"G2", 0, 12},    {"H3", 0, 120},  {"F4", 0, 1152}, {"C2n", 1, 1},
      {"C2n", 5, 5},    {"C2n", 12, 12},  {"C3n", 7, 7},    {"I3n", 2, 4},   {"I3n", 8, 16}, {"T", 0, 12},
      {"W", 0, 24},     {"H", 0, 60},     {"Sn", 4, 24}};
  for (const auto& [family, n, order] : rows) {
    EXPECT_EQ(group_of(family, n).order(), order) << family << n;
    const auto entry = published_entry(family, n);
    if (entry && family != "Sn") EXPECT_EQ(entry->order, order) << family << n;
  }
}

TEST(Enumerate, ClosureAndOrthogonality) {
  for (const auto& [family, n] : std::vector<std::pair<std::string, int>>{{"H3", 0}, {"W", 0}, {"I2n", 7}, {"Bn", 3}}) {
    const FiniteGroup g = group_of(family, n);
    for (std::size_t i = 0; i < g.order(); ++i) {
      const Eigen::MatrixXd& m = g.element(i);
      EXPECT_LE((m.transpose() * m - Eigen::MatrixXd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff(), 1e-10);
      for (std::size_t j = 0; j < g.order(); ++j) ASSERT_TRUE(g.index_of(m * g.element(j)).has_value());
    }
  }
}

TEST(Enumerate, ExactElementsOrthogonal) {
  const FiniteGroup g = group_of("H", 0);
  ASSERT_TRUE(g.has_exact());
  for (std::size_t i = 0; i < g.order(); ++i) {
    const ExactMatrix& m = g.exact_element(i);
    EXPECT_EQ(m.transpose() * m, ExactMatrix::identity(3));
  }
}

TEST(Enumerate, Deterministic) {
  const FiniteGroup a = group_of("W");
  const FiniteGroup b = group_of("W");
  for (std::size_t i = 0; i < a.order(); ++i) EXPECT_EQ(a.element(i), b.element(i));
}

TEST(Enumerate, Errors) {
  EXPECT_THROW(enumerate_group(catalog("H3"), 50), Error);
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 0.5, 0, 1;
  try {
    enumerate_group(make_float_spec("bad", {bad}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_orthogonal);
  }
  try {
    catalog("Dn", {3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::bad_params);
  }
  try {
    catalog("Q7");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unknown_family);
  }
  EXPECT_THROW(catalog("I2n", {6, 0, true}), Error);
}

TEST(Isotropy, Examples) {
  const FiniteGroup t = group_of("T");
  const IsotropyData vertex = isotropy(t, Eigen::Vector3d(1, 1, 1));
  EXPECT_EQ(vertex.stabilizer.size(), 3u);
  EXPECT_EQ(vertex.index, 4u);

  const FiniteGroup i5 = group_of("I2n", 5);
  EXPECT_EQ(isotropy(i5, Eigen::Vector2d(1, 0)).stabilizer.size() * isotropy(i5, Eigen::Vector2d(1, 0)).index, 10u);
  const auto iso = max_isotropy_per_component(i5, irreducible_decomposition(i5));
  ASSERT_EQ(iso.size(), 1u);
  EXPECT_EQ(iso[0].stabilizer.size(), 2u);
  EXPECT_EQ(iso[0].index, 5u);

  EXPECT_EQ(isotropy(t, Eigen::Vector3d::Zero()).stabilizer.size(), 12u);
}

TEST(Isotropy, OrbitStabilizer) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (const auto& [family, n] : std::vector<std::pair<std::string, int>>{{"T", 0}, {"W", 0}, {"H", 0}, {"Bn", 3}, {"I2n", 8}}) {
    const FiniteGroup g = group_of(family, n);
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd v(g.dimension());
      for (int i = 0; i < v.size(); ++i) v(i) = normal(rng);
      EXPECT_EQ(orbit_size(g, v) * isotropy(g, v).stabilizer.size(), g.order());
    }
  }
}

TEST(Isotropy, MaximalPerComponent) {
  const auto w = group_of("W");
  const auto wi = max_isotropy_per_component(w, irreducible_decomposition(w));
  ASSERT_EQ(wi.size(), 1u);
  EXPECT_EQ(wi[0].stabilizer.size(), 4u);
  EXPECT_EQ(wi[0].index, 6u);

  const auto h = group_of("H");
  const auto hi = max_isotropy_per_component(h, irreducible_decomposition(h));
  EXPECT_EQ(hi[0].stabilizer.size(), 5u);
  EXPECT_EQ(hi[0].index, 12u);

  const auto c = group_of("C2n", 5);
  const auto ci = max_isotropy_per_component(c, irreducible_decomposition(c));
  EXPECT_EQ(ci[0].stabilizer.size(), 1u);
  EXPECT_EQ(ci[0].index, 5u);
}

TEST(FixedSpace, Examples) {
  EXPECT_EQ(fixed_space(group_of("C3n", 4)).cols(), 1);
  EXPECT_EQ(fixed_space(enumerate_group(catalog("trivial", {0, 3}))).cols(), 3);
  const Eigen::MatrixXd s = fixed_space(group_of("Sn", 4));
  ASSERT_EQ(s.cols(), 1);
  EXPECT_NEAR(std::abs(s.col(0).sum()), 2.0, 1e-12);
  EXPECT_EQ(fixed_space(group_of("T")).cols(), 0);

  const FixedSplit split = split_fixed(group_of("C3n", 3));
  EXPECT_EQ(split.fixed.cols(), 1);
  EXPECT_EQ(split.complement.cols(), 2);
}

TEST(Decomposition, Examples) {
  const FiniteGroup i3 = group_of("I3n", 5);
  const Decomposition d = irreducible_decomposition(i3);
  std::multiset<long> dims;
  for (const auto& c : d.components) dims.insert(c.cols());
  EXPECT_EQ(dims, (std::multiset<long>{1, 2}));
  for (const auto& c : d.components) {
    const Eigen::MatrixXd proj = c * c.transpose();
    for (const auto& g : i3.elements()) EXPECT_LE((proj * g - g * proj).cwiseAbs().maxCoeff(), 1e-9);
  }
  EXPECT_EQ(irreducible_decomposition(group_of("T")).components.size(), 1u);
  EXPECT_EQ(irreducible_decomposition(enumerate_group(catalog("trivial", {0, 2}))).components.size(), 2u);
}

TEST(ComputeK, TableColumn) {
  // k from the published tables for groups with a cheap d
  const std::vector<std::tuple<std::string, int, int, int>> rows = {
      {"An", 2, 3, 3}, {"Bn", 2, 4, 4}, {"I2n", 5, 5, 5}, {"G2", 0, 6, 6}, {"T", 0, 6, 6}, {"C2n", 7, 7, 7}};
  for (const auto& [family, n, d, k] : rows) {
    const FiniteGroup g = group_of(family, n);
    EXPECT_EQ(compute_k(g, irreducible_decomposition(g), d), k) << family << n;
  }
  const FiniteGroup h3 = group_of("H3");
  EXPECT_EQ(compute_k(h3, irreducible_decomposition(h3), 10), 12);
}
