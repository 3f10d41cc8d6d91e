#pragma once

// Register bookkeeping and canonical states.
//
// Qubit 0 is the most significant bit of a basis index (the top wire). The
// clean register A occupies the top a wires on input and the kept register D
// the bottom d wires on output, so C is always the top c wires.

#include <cleanq/linalg.hpp>

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cleanq {

/// Sizes of the four registers with a + b = c + d = n.
struct RegisterLayout {
  int a = 0;  // clean input qubits (top)
  int b = 0;  // maximally mixed input qubits
  int c = 0;  // measured / discarded output qubits (top)
  int d = 0;  // kept output qubits (bottom)

  RegisterLayout() = default;
  RegisterLayout(int a_, int b_, int c_, int d_) : a(a_), b(b_), c(c_), d(d_) { validate(); }

  void validate() const {
    if (a < 0 || b < 0 || c < 0 || d < 0) throw std::invalid_argument("register sizes must be non-negative");
    if (a + b != c + d)
      throw std::invalid_argument("inconsistent layout: a+b=" + std::to_string(a + b) + " but c+d=" +
                                  std::to_string(c + d));
    if (a + b < 1) throw std::invalid_argument("layout needs at least one qubit");
    if (a + b > max_qubits()) throw DimensionError("layout exceeds qubit cap " + std::to_string(max_qubits()));
  }

  int n() const { return a + b; }
  std::size_t A() const { return std::size_t{1} << a; }
  std::size_t B() const { return std::size_t{1} << b; }
  std::size_t C() const { return std::size_t{1} << c; }
  std::size_t D() const { return std::size_t{1} << d; }
  std::size_t N() const { return std::size_t{1} << n(); }

  /// 2^{a-d}, the recurring bound C/B.
  double clean_ratio() const { return std::ldexp(1.0, a - d); }

  friend bool operator==(const RegisterLayout&, const RegisterLayout&) = default;
};

inline std::string to_string(const RegisterLayout& l) {
  return "a=" + std::to_string(l.a) + ",b=" + std::to_string(l.b) + ",c=" + std::to_string(l.c) +
         ",d=" + std::to_string(l.d);
}

/// Hermitian, unit-trace matrix over n qubits. Construction checks Hermiticity
/// and trace; positivity is checked on demand by min_eigenvalue().
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
    if (!m_.square()) throw std::invalid_argument("density matrix must be square");
    qubits_ = log2_exact(m_.rows());
    if (!is_hermitian(m_)) throw std::invalid_argument("density matrix must be Hermitian");
    const Complex tr = m_.trace();
    if (std::abs(tr - 1.0) > kMatrixTol)
      throw std::invalid_argument("density matrix trace is " + std::to_string(tr.real()) + ", expected 1");
  }

  int qubits() const { return qubits_; }
  std::size_t dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

  double min_eigenvalue() const { return hermitian_eigenvalues(m_).front(); }

  /// tr(rho^2), computed from entries.
  double purity() const {
    double s = 0.0;
    for (const auto& z : m_.data()) s += std::norm(z);
    return s;
  }

  friend bool operator==(const DensityMatrix&, const DensityMatrix&) = default;

 private:
  ComplexMatrix m_;
  int qubits_ = 0;
};

/// Checks all density-matrix invariants including PSD (eigenvalues >= -1e-10).
inline bool is_valid_state(const DensityMatrix& s) { return s.min_eigenvalue() >= -kMatrixTol; }

/// |x><x| for a computational basis index x on n qubits.
inline DensityMatrix basis_state(int n, std::size_t x) {
  ComplexMatrix m(std::size_t{1} << n, std::size_t{1} << n);
  if (x >= m.rows()) throw std::invalid_argument("basis index out of range");
  m(x, x) = 1.0;
  return DensityMatrix(std::move(m));
}

/// (1/2^m) I.
inline DensityMatrix maximally_mixed(int m) {
  if (m < 1) throw std::invalid_argument("maximally_mixed needs at least one qubit");
  const std::size_t dim = std::size_t{1} << m;
  return DensityMatrix(ComplexMatrix::identity(dim) * (1.0 / static_cast<double>(dim)));
}

/// |0><0|_A (x) (1/B) I_B, i.e. (1/B) times the projector onto the first B basis states.
inline DensityMatrix dqc_input(const RegisterLayout& layout) {
  layout.validate();
  ComplexMatrix m(layout.N(), layout.N());
  const double w = 1.0 / static_cast<double>(layout.B());
  for (std::size_t x = 0; x < layout.B(); ++x) m(x, x) = w;
  return DensityMatrix(std::move(m));
}

/// Rank-one projector |psi><psi|.
inline DensityMatrix pure_state(std::span<const Complex> amplitudes) {
  if (!is_power_of_two(amplitudes.size())) throw std::invalid_argument("amplitude count must be a power of two");
  double norm = 0.0;
  for (const auto& z : amplitudes) norm += std::norm(z);
  if (std::abs(std::sqrt(norm) - 1.0) > kMatrixTol) throw std::invalid_argument("state vector is not normalised");
  const std::size_t n = amplitudes.size();
  ComplexMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(r, c) = amplitudes[r] * std::conj(amplitudes[c]);
  return DensityMatrix(std::move(m));
}

inline DensityMatrix pure_state(std::initializer_list<Complex> amplitudes) {
  return pure_state(std::span<const Complex>(amplitudes.begin(), amplitudes.size()));
}

/// Validated bijection on wires: perm[i] is the wire that qubit i moves to.
inline void validate_permutation(std::span<const int> perm, int n) {
  if (static_cast<int>(perm.size()) != n) throw std::invalid_argument("permutation length does not match qubit count");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)])
      throw std::invalid_argument("wire map is not a bijection on {0..n-1}");
    seen[static_cast<std::size_t>(p)] = true;
  }
}

/// Basis index after moving bit of wire i to wire perm[i].
inline std::size_t permute_index(std::size_t x, std::span<const int> perm) {
  const int n = static_cast<int>(perm.size());
  std::size_t y = 0;
  for (int i = 0; i < n; ++i) {
    const std::size_t bit = (x >> (n - 1 - i)) & 1u;
    y |= bit << (n - 1 - perm[static_cast<std::size_t>(i)]);
  }
  return y;
}

/// 0/1 unitary sending |x_0 ... x_{n-1}> to the state whose wire perm[i] carries x_i.
inline Unitary permutation_unitary(std::span<const int> perm, int n) {
  validate_permutation(perm, n);
  const std::size_t dim = std::size_t{1} << n;
  ComplexMatrix m(dim, dim);
  for (std::size_t x = 0; x < dim; ++x) m(permute_index(x, perm), x) = 1.0;
  return Unitary::assume(std::move(m));
}

inline Unitary permutation_unitary(std::initializer_list<int> perm, int n) {
  return permutation_unitary(std::span<const int>(perm.begin(), perm.size()), n);
}

/// Wire map that moves the clean wires 0..m-1 (m = min(a, d)) onto the top of
/// D, filling the remaining positions with the other wires in order.
inline std::vector<int> forwarding_permutation(const RegisterLayout& l) {
  const int n = l.n();
  const int m = std::min(l.a, l.d);
  std::vector<int> perm(static_cast<std::size_t>(n), -1);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (int i = 0; i < m; ++i) {
    perm[static_cast<std::size_t>(i)] = l.c + i;
    used[static_cast<std::size_t>(l.c + i)] = true;
  }
  int next = 0;
  for (int i = m; i < n; ++i) {
    while (used[static_cast<std::size_t>(next)]) ++next;
    perm[static_cast<std::size_t>(i)] = next;
    used[static_cast<std::size_t>(next)] = true;
  }
  return perm;
}

}  // namespace cleanq
