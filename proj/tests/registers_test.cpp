#include <cleanq/registers.hpp>
#include <cleanq/thermo.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "test_util.hpp"

using namespace cleanq;

namespace {

std::vector<RegisterLayout> small_layouts(int max_n) {
  std::vector<RegisterLayout> out;
  for (int n = 1; n <= max_n; ++n)
    for (int a = 0; a <= n; ++a)
      for (int c = 0; c <= n; ++c) out.emplace_back(a, n - a, c, n - c);
  return out;
}

// Reference bit permutation: read every bit of x, write it to perm[i].
std::size_t permuted_basis_oracle(std::size_t x, const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  std::vector<int> bits(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) bits[static_cast<std::size_t>(i)] = static_cast<int>((x >> (n - 1 - i)) & 1u);
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = bits[static_cast<std::size_t>(i)];
  std::size_t y = 0;
  for (int b : out) y = (y << 1) | static_cast<std::size_t>(b);
  return y;
}

}  // namespace

TEST(layout, validates_counts) {
  EXPECT_NO_THROW(RegisterLayout(1, 2, 1, 2));
  EXPECT_THROW(RegisterLayout(1, 2, 2, 2), std::invalid_argument);
  EXPECT_THROW(RegisterLayout(-1, 2, 0, 1), std::invalid_argument);
  EXPECT_THROW(RegisterLayout(0, 0, 0, 0), std::invalid_argument);
  const RegisterLayout l(1, 2, 1, 2);
  EXPECT_EQ(l.N(), 8u);
  EXPECT_EQ(l.B(), 4u);
  EXPECT_DOUBLE_EQ(l.clean_ratio(), 0.5);
}

TEST(dqc_input, examples) {
  EXPECT_EQ(dqc_input({1, 1, 1, 1}).matrix(), ComplexMatrix::diagonal({0.5, 0.5, 0, 0}));
  EXPECT_EQ(dqc_input({0, 2, 0, 2}).matrix(), ComplexMatrix::identity(4) * 0.25);
  EXPECT_EQ(dqc_input({2, 0, 2, 0}).matrix(), ComplexMatrix::diagonal({1, 0, 0, 0}));
}

TEST(dqc_input, equals_clean_times_mixed_and_has_entropy_b) {
  for (const auto& l : small_layouts(6)) {
    const auto rho = dqc_input(l);
    EXPECT_TRUE(is_valid_state(rho));
    EXPECT_NEAR(von_neumann_entropy(rho), l.b, 1e-9) << to_string(l);
    if (l.a >= 1 && l.b >= 1) {
      std::vector<Complex> e0(l.A());
      e0[0] = 1.0;
      EXPECT_EQ(rho.matrix(), kron(pure_state(e0).matrix(), maximally_mixed(l.b).matrix())) << to_string(l);
    }
  }
}

TEST(pure_state, examples) {
  EXPECT_EQ(pure_state({1, 0}).matrix(), ComplexMatrix::diagonal({1, 0}));
  const double r = 1 / std::sqrt(2.0);
  const auto plus = pure_state({r, r});
  for (const auto& z : plus.matrix().data()) EXPECT_NEAR(z.real(), 0.5, 1e-15);
  EXPECT_THROW(pure_state({1, 1}), std::invalid_argument);
  EXPECT_THROW(pure_state({1, 0, 0}), std::invalid_argument);
}

TEST(pure_state, random_vectors_have_unit_purity) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Complex> v(8);
    double norm = 0;
    for (auto& z : v) {
      z = Complex(normal(rng), normal(rng));
      norm += std::norm(z);
    }
    for (auto& z : v) z /= std::sqrt(norm);
    const auto s = pure_state(v);
    EXPECT_NEAR(s.purity(), 1.0, 1e-10);
    EXPECT_TRUE(is_valid_state(s));
  }
}

TEST(maximally_mixed, examples) {
  EXPECT_EQ(maximally_mixed(1).matrix(), ComplexMatrix::diagonal({0.5, 0.5}));
  EXPECT_EQ(maximally_mixed(2).matrix(), ComplexMatrix::identity(4) * 0.25);
  for (int m = 1; m <= 5; ++m) EXPECT_NEAR(von_neumann_entropy(maximally_mixed(m)), m, 1e-9);
  EXPECT_THROW(maximally_mixed(0), std::invalid_argument);
}

TEST(density_matrix, rejects_invalid_matrices) {
  EXPECT_THROW(DensityMatrix(ComplexMatrix::diagonal({0.5, 0.4})), std::invalid_argument);
  EXPECT_THROW(DensityMatrix(ComplexMatrix(2, 2, {0.5, 1, 0, 0.5})), std::invalid_argument);
  EXPECT_THROW(DensityMatrix(ComplexMatrix::identity(3) * (1.0 / 3)), std::invalid_argument);
  EXPECT_FALSE(is_valid_state(DensityMatrix(ComplexMatrix::diagonal({1.5, -0.5}))));
}

TEST(permutation_unitary, identity_and_swap) {
  EXPECT_EQ(permutation_unitary({0, 1, 2}, 3).matrix(), ComplexMatrix::identity(8));
  const auto swap01 = permutation_unitary({1, 0}, 2);
  EXPECT_EQ(swap01(2, 1), Complex(1));  // |01> -> |10>
  EXPECT_EQ(swap01(1, 2), Complex(1));
  EXPECT_EQ(swap01(0, 0), Complex(1));
  EXPECT_EQ(swap01(3, 3), Complex(1));
}

TEST(permutation_unitary, matches_bit_oracle_and_composes) {
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 5; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<int> p(static_cast<std::size_t>(n)), q(static_cast<std::size_t>(n));
      std::iota(p.begin(), p.end(), 0);
      std::iota(q.begin(), q.end(), 0);
      std::shuffle(p.begin(), p.end(), rng);
      std::shuffle(q.begin(), q.end(), rng);
      const auto up = permutation_unitary(p, n);
      for (std::size_t x = 0; x < up.dim(); ++x) EXPECT_EQ(up(permuted_basis_oracle(x, p), x), Complex(1));
      std::vector<int> pq(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) pq[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(q[static_cast<std::size_t>(i)])];
      EXPECT_EQ(permutation_unitary(pq, n).matrix(), (up * permutation_unitary(q, n)).matrix());
      EXPECT_TRUE(is_unitary(up.matrix()));
    }
  }
}

TEST(permutation_unitary, rejects_non_bijections) {
  EXPECT_THROW(permutation_unitary({0, 0}, 2), std::invalid_argument);
  EXPECT_THROW(permutation_unitary({0, 2}, 2), std::invalid_argument);
  EXPECT_THROW(permutation_unitary({0}, 2), std::invalid_argument);
}

TEST(forwarding_permutation, places_clean_wires_on_top_of_d) {
  for (const auto& l : small_layouts(6)) {
    const auto perm = forwarding_permutation(l);
    validate_permutation(perm, l.n());
    for (int i = 0; i < std::min(l.a, l.d); ++i) EXPECT_EQ(perm[static_cast<std::size_t>(i)], l.c + i);
  }
}
