#pragma once

// Dense complex matrix kernels shared by every other cleanq header.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cleanq {

using Complex = std::complex<double>;

/// Tolerance used for Hermiticity, unitarity and trace checks (max-entry).
inline constexpr double kMatrixTol = 1e-10;

/// Raised when a requested register exceeds the configured qubit cap.
class DimensionError : public std::length_error {
 public:
  using std::length_error::length_error;
};

namespace detail {
inline std::atomic<int> g_max_qubits{12};
}  // namespace detail

/// Largest register (in qubits) any dense matrix may span. Default 12.
inline int max_qubits() { return detail::g_max_qubits.load(std::memory_order_relaxed); }

inline void set_max_qubits(int q) {
  if (q < 1 || q > 30) throw std::invalid_argument("max qubits must lie in [1, 30]");
  detail::g_max_qubits.store(q, std::memory_order_relaxed);
}

inline std::size_t max_dimension() { return std::size_t{1} << max_qubits(); }

inline bool is_power_of_two(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

/// log2 of a power of two.
inline int log2_exact(std::size_t x) {
  if (!is_power_of_two(x)) throw std::invalid_argument("dimension " + std::to_string(x) + " is not a power of two");
  int k = 0;
  while ((std::size_t{1} << k) < x) ++k;
  return k;
}

namespace detail {
// std::complex operator* goes through the Annex G slow path on GCC; the kernels
// below only ever see finite values.
inline void madd(Complex& acc, const Complex& a, const Complex& b) {
  const double ar = a.real(), ai = a.imag(), br = b.real(), bi = b.imag();
  acc = Complex(acc.real() + ar * br - ai * bi, acc.imag() + ar * bi + ai * br);
}
// acc += a * conj(b)
inline void madd_conj(Complex& acc, const Complex& a, const Complex& b) {
  const double ar = a.real(), ai = a.imag(), br = b.real(), bi = b.imag();
  acc = Complex(acc.real() + ar * br + ai * bi, acc.imag() + ai * br - ar * bi);
}
inline Complex mul(const Complex& a, const Complex& b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}
}  // namespace detail

/// Row-major dense complex matrix. Always at least 1x1.
class ComplexMatrix {
 public:
  ComplexMatrix() : ComplexMatrix(1, 1) {}

  ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("matrix dimensions must be positive");
    const std::size_t cap = max_dimension();
    if (rows > cap || cols > cap)
      throw DimensionError("matrix dimension " + std::to_string(std::max(rows, cols)) + " exceeds cap 2^" +
                           std::to_string(max_qubits()));
    data_.assign(rows * cols, Complex{});
  }

  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries) : ComplexMatrix(rows, cols) {
    if (entries.size() != rows * cols) throw std::invalid_argument("entry count does not match rows*cols");
    for (const auto& z : entries)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::invalid_argument("matrix entries must be finite");
    data_ = std::move(entries);
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const double> d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static ComplexMatrix diagonal(std::initializer_list<double> d) {
    return diagonal(std::span<const double>(d.begin(), d.size()));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<Complex> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const Complex> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<const Complex> data() const { return data_; }
  std::span<Complex> data() { return data_; }

  Complex trace() const {
    Complex t{};
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  ComplexMatrix& operator*=(Complex s) {
    for (auto& z : data_) z = detail::mul(z, s);
    return *this;
  }
  ComplexMatrix& operator*=(double s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, double s) { return a *= s; }
  friend ComplexMatrix operator*(double s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  void require_same_shape(const ComplexMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix shape mismatch");
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<Complex> data_;
};

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product shape mismatch");
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto orow = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < brow.size(); ++j) detail::madd(orow[j], aik, brow[j]);
    }
  }
  return out;
}

/// a * b^dagger without materialising the conjugate transpose.
inline ComplexMatrix mul_adjoint(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("matrix product shape mismatch");
  ComplexMatrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto arow = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      auto brow = b.row(j);
      Complex acc{};
      for (std::size_t k = 0; k < arow.size(); ++k) detail::madd_conj(acc, arow[k], brow[k]);
      out(i, j) = acc;
    }
  }
  return out;
}

inline ComplexMatrix dagger(const ComplexMatrix& m) {
  ComplexMatrix out(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = std::conj(m(r, c));
  return out;
}

/// Kronecker product; entry (i1*r2+i2, j1*c2+j2) = m1(i1,j1) * m2(i2,j2).
inline ComplexMatrix kron(const ComplexMatrix& m1, const ComplexMatrix& m2) {
  const std::size_t rows = m1.rows() * m2.rows();
  const std::size_t cols = m1.cols() * m2.cols();
  if (rows > max_dimension() || cols > max_dimension())
    throw DimensionError("kron result exceeds cap 2^" + std::to_string(max_qubits()));
  ComplexMatrix out(rows, cols);
  for (std::size_t i1 = 0; i1 < m1.rows(); ++i1)
    for (std::size_t j1 = 0; j1 < m1.cols(); ++j1) {
      const Complex s = m1(i1, j1);
      if (s == Complex{}) continue;
      for (std::size_t i2 = 0; i2 < m2.rows(); ++i2)
        for (std::size_t j2 = 0; j2 < m2.cols(); ++j2)
          out(i1 * m2.rows() + i2, j1 * m2.cols() + j2) = detail::mul(s, m2(i2, j2));
    }
  return out;
}

inline double max_abs(const ComplexMatrix& m) {
  double best = 0.0;
  for (const auto& z : m.data()) best = std::max(best, std::abs(z));
  return best;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix shape mismatch");
  double best = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) best = std::max(best, std::abs(a.data()[i] - b.data()[i]));
  return best;
}

inline double frobenius_norm(const ComplexMatrix& m) {
  double s = 0.0;
  for (const auto& z : m.data()) s += std::norm(z);
  return std::sqrt(s);
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kMatrixTol) {
  if (!m.square()) return false;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = r; c < m.cols(); ++c)
      if (std::abs(m(r, c) - std::conj(m(c, r))) > tol) return false;
  return true;
}

/// max-entry distance of m^dagger m from the identity.
inline double unitarity_defect(const ComplexMatrix& m) {
  if (!m.square()) throw std::invalid_argument("unitarity needs a square matrix");
  // (m^dagger m)_{ij} = sum_k conj(m_ki) m_kj; accumulate over rows k.
  const std::size_t n = m.rows();
  ComplexMatrix gram(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    auto row = m.row(k);
    for (std::size_t i = 0; i < n; ++i) {
      const Complex ci = std::conj(row[i]);
      if (ci == Complex{}) continue;
      auto grow = gram.row(i);
      for (std::size_t j = 0; j < n; ++j) detail::madd(grow[j], ci, row[j]);
    }
  }
  return max_abs_diff(gram, ComplexMatrix::identity(n));
}

inline bool is_unitary(const ComplexMatrix& m, double tol = kMatrixTol) {
  return m.square() && unitarity_defect(m) <= tol;
}

/// A square matrix checked to be unitary to kMatrixTol.
class Unitary {
 public:
  explicit Unitary(ComplexMatrix m) : m_(std::move(m)) {
    if (!m_.square()) throw std::invalid_argument("unitary must be square");
    const double defect = unitarity_defect(m_);
    if (defect > kMatrixTol)
      throw std::invalid_argument("matrix is not unitary (max |U^dagger U - I| = " + std::to_string(defect) + ")");
  }

  /// For producers that are unitary by construction (permutations, gate products).
  static Unitary assume(ComplexMatrix m) { return Unitary(std::move(m), Unchecked{}); }

  static Unitary identity(std::size_t n) { return assume(ComplexMatrix::identity(n)); }

  const ComplexMatrix& matrix() const { return m_; }
  std::size_t dim() const { return m_.rows(); }
  const Complex& operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

  friend Unitary operator*(const Unitary& a, const Unitary& b) { return assume(a.m_ * b.m_); }

 private:
  struct Unchecked {};
  Unitary(ComplexMatrix m, Unchecked) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // column i pairs with eigenvalues[i]
};

/// Cyclic complex Jacobi. Degenerate eigenspaces come back in an arbitrary
/// orthonormal basis.
inline EigenDecomposition hermitian_eig(const ComplexMatrix& input) {
  if (!input.square()) throw std::invalid_argument("hermitian_eig needs a square matrix");
  if (!is_hermitian(input)) throw std::invalid_argument("hermitian_eig input is not Hermitian");
  const std::size_t n = input.rows();
  ComplexMatrix a = input;
  // symmetrise so rounding in the input cannot bias the rotations
  for (std::size_t r = 0; r < n; ++r) {
    a(r, r) = a(r, r).real();
    for (std::size_t c = r + 1; c < n; ++c) {
      const Complex avg = 0.5 * (a(r, c) + std::conj(a(c, r)));
      a(r, c) = avg;
      a(c, r) = std::conj(avg);
    }
  }
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double scale = std::max(frobenius_norm(a), 1e-300);
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(2.0 * off) <= 1e-15 * scale) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double r = std::abs(apq);
        if (r <= 1e-300 || r <= 1e-18 * scale) {
          if (r != 0.0 && r <= 1e-18 * scale) a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const Complex phase = apq / r;  // e^{i phi}
        const Complex phase_c = std::conj(phase);
        const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * r);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q); A <- J^dagger A J, V <- V J.
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          const Complex akq_ph = detail::mul(akq, phase_c);
          a(k, p) = c * akp - s * akq_ph;
          a(k, q) = s * akp + c * akq_ph;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          const Complex aqk_ph = detail::mul(aqk, phase);
          a(p, k) = c * apk - s * aqk_ph;
          a(q, k) = s * apk + c * aqk_ph;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          const Complex vkq_ph = detail::mul(vkq, phase_c);
          v(k, p) = c * vkp - s * vkq_ph;
          v(k, q) = s * vkp + c * vkq_ph;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  EigenDecomposition out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    out.eigenvalues[i] = a(order[i], order[i]).real();
    for (std::size_t k = 0; k < n; ++k) out.eigenvectors(k, i) = v(k, order[i]);
  }
  return out;
}

inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) { return hermitian_eig(m).eigenvalues; }

/// V diag(f(lambda)) V^dagger.
template <class F>
ComplexMatrix spectral_apply(const EigenDecomposition& e, F&& f) {
  const std::size_t n = e.eigenvalues.size();
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = f(e.eigenvalues[i]);
    if (w == 0.0) continue;
    for (std::size_t r = 0; r < n; ++r) {
      const Complex vr = w * e.eigenvectors(r, i);
      auto orow = out.row(r);
      for (std::size_t c = 0; c < n; ++c) detail::madd_conj(orow[c], vr, e.eigenvectors(c, i));
    }
  }
  return out;
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
inline double trace_norm(const ComplexMatrix& m) {
  if (!is_hermitian(m)) throw std::invalid_argument("trace_norm expects a Hermitian matrix");
  double s = 0.0;
  for (double l : hermitian_eigenvalues(m)) s += std::abs(l);
  return s;
}

}  // namespace cleanq
