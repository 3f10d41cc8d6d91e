#include <cleanq/linalg.hpp>

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace cleanq;
using cleanq::testing::random_hermitian;
using cleanq::testing::random_matrix;

namespace {

const ComplexMatrix kX(2, 2, {0, 1, 1, 0});
const ComplexMatrix kZ(2, 2, {1, 0, 0, -1});

// Brute-force Kronecker entry: rows (i1*r2 + i2), cols (j1*c2 + j2).
Complex kron_entry(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t r, std::size_t c) {
  return a(r / b.rows(), c / b.cols()) * b(r % b.rows(), c % b.cols());
}

}  // namespace

TEST(kron, identities) {
  EXPECT_EQ(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
  const ComplexMatrix got = kron(ComplexMatrix::diagonal({1, 0}), ComplexMatrix::identity(2) * 0.5);
  EXPECT_EQ(got, ComplexMatrix::diagonal({0.5, 0.5, 0, 0}));
}

TEST(kron, pauli_entries_match_index_formula) {
  const ComplexMatrix xz = kron(kX, kZ);
  EXPECT_EQ(xz(0, 2), Complex(1));
  EXPECT_EQ(xz(1, 3), Complex(-1));
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(xz(r, c), kron_entry(kX, kZ, r, c));
}

TEST(kron, rectangular_factors_match_index_formula) {
  const auto a = random_matrix(2, 3, 1), b = random_matrix(3, 2, 2);
  const auto k = kron(a, b);
  ASSERT_EQ(k.rows(), 6u);
  ASSERT_EQ(k.cols(), 6u);
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 6; ++c) EXPECT_NEAR(std::abs(k(r, c) - kron_entry(a, b, r, c)), 0.0, 1e-14);
}

TEST(kron, mixed_product_property) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = random_matrix(2, 2, seed), b = random_matrix(4, 4, seed + 100);
    const auto c = random_matrix(2, 2, seed + 200), d = random_matrix(4, 4, seed + 300);
    EXPECT_LE(max_abs_diff(kron(a, b) * kron(c, d), kron(a * c, b * d)), 1e-10);
  }
}

TEST(kron, dimension_cap_is_enforced) {
  const int saved = max_qubits();
  set_max_qubits(3);
  EXPECT_THROW(kron(ComplexMatrix::identity(4), ComplexMatrix::identity(4)), DimensionError);
  EXPECT_NO_THROW(kron(ComplexMatrix::identity(4), ComplexMatrix::identity(2)));
  set_max_qubits(saved);
}

TEST(dagger, basics) {
  EXPECT_EQ(dagger(ComplexMatrix::identity(3)), ComplexMatrix::identity(3));
  const ComplexMatrix m(2, 2, {0, Complex(0, 1), 0, 0});
  EXPECT_EQ(dagger(m), ComplexMatrix(2, 2, {0, 0, Complex(0, -1), 0}));
  const auto r = random_matrix(3, 5, 7);
  EXPECT_EQ(dagger(dagger(r)), r);
}

TEST(matrix, rejects_bad_shapes_and_values) {
  EXPECT_THROW(ComplexMatrix(0, 2), std::invalid_argument);
  EXPECT_THROW(ComplexMatrix(2, 2, {1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(ComplexMatrix(1, 1, {std::nan("")}), std::invalid_argument);
  EXPECT_THROW(ComplexMatrix(2, 3) * ComplexMatrix(2, 3), std::invalid_argument);
}

TEST(hermitian_eig, diagonal_and_pauli) {
  auto e = hermitian_eig(ComplexMatrix::diagonal({3, 1, 2}));
  ASSERT_EQ(e.eigenvalues.size(), 3u);
  EXPECT_NEAR(e.eigenvalues[0], 1, 1e-14);
  EXPECT_NEAR(e.eigenvalues[1], 2, 1e-14);
  EXPECT_NEAR(e.eigenvalues[2], 3, 1e-14);

  e = hermitian_eig(kX);
  EXPECT_NEAR(e.eigenvalues[0], -1, 1e-14);
  EXPECT_NEAR(e.eigenvalues[1], 1, 1e-14);
}

TEST(hermitian_eig, rejects_non_hermitian) {
  EXPECT_THROW(hermitian_eig(ComplexMatrix(2, 2, {0, 1, 0, 0})), std::invalid_argument);
  EXPECT_THROW(hermitian_eig(ComplexMatrix(2, 3)), std::invalid_argument);
}

TEST(hermitian_eig, random_reconstruction_and_orthonormality) {
  for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 16u, 33u, 64u}) {
    const auto h = random_hermitian(n, 1000 + n);
    const auto e = hermitian_eig(h);
    EXPECT_TRUE(std::is_sorted(e.eigenvalues.begin(), e.eigenvalues.end()));
    const auto rebuilt = spectral_apply(e, [](double l) { return l; });
    EXPECT_LE(frobenius_norm(rebuilt - h) / frobenius_norm(h), 1e-10) << "n=" << n;
    EXPECT_LE(max_abs_diff(dagger(e.eigenvectors) * e.eigenvectors, ComplexMatrix::identity(n)), 1e-10);
    double sum = 0.0;
    for (double l : e.eigenvalues) sum += l;
    EXPECT_NEAR(sum, h.trace().real(), 1e-10);
    const auto oracle = cleanq::testing::oracle_eigenvalues(h);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(e.eigenvalues[i], oracle[i], 1e-10);
  }
}

TEST(hermitian_eig, degenerate_spectrum_reconstructs) {
  // U diag(1,1,1,2,2,5) U^dagger with a dense unitary basis change
  const auto h0 = random_hermitian(6, 5);
  const auto basis = hermitian_eig(h0).eigenvectors;
  const auto d = ComplexMatrix::diagonal({1, 1, 1, 2, 2, 5});
  auto h = basis * d * dagger(basis);
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = r; c < 6; ++c) h(c, r) = std::conj(h(r, c));
  const auto e = hermitian_eig(h);
  EXPECT_LE(max_abs_diff(spectral_apply(e, [](double l) { return l; }), h), 1e-10);
  EXPECT_NEAR(e.eigenvalues[0], 1, 1e-10);
  EXPECT_NEAR(e.eigenvalues[2], 1, 1e-10);
  EXPECT_NEAR(e.eigenvalues[4], 2, 1e-10);
}

TEST(trace_norm, examples) {
  EXPECT_NEAR(trace_norm(ComplexMatrix::identity(4)), 4, 1e-14);
  EXPECT_NEAR(trace_norm(ComplexMatrix::diagonal({1, -1})), 2, 1e-14);
  EXPECT_THROW(trace_norm(ComplexMatrix(2, 2, {0, 1, 0, 0})), std::invalid_argument);
}

TEST(trace_norm, is_a_norm_on_random_hermitian_triples) {
  EXPECT_NEAR(trace_norm(ComplexMatrix(4, 4)), 0.0, 1e-15);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto a = random_hermitian(6, seed), b = random_hermitian(6, seed + 50), c = random_hermitian(6, seed + 99);
    const double na = trace_norm(a);
    EXPECT_GT(na, 0);
    EXPECT_NEAR(na, cleanq::testing::oracle_trace_norm(a), 1e-10);
    EXPECT_LE(trace_norm(a - c), trace_norm(a - b) + trace_norm(b - c) + 1e-10);
    EXPECT_NEAR(trace_norm(a * 2.5), 2.5 * na, 1e-9);
  }
}

TEST(unitary, rejects_non_unitary_and_accepts_products) {
  EXPECT_THROW(Unitary(ComplexMatrix::diagonal({1, 2})), std::invalid_argument);
  EXPECT_THROW(Unitary(ComplexMatrix(2, 3)), std::invalid_argument);
  const Unitary x(kX), z(kZ);
  EXPECT_LE(unitarity_defect((x * z).matrix()), 1e-15);
}
