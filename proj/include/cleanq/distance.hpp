#pragma once

#include <cleanq/registers.hpp>

#include <algorithm>
#include <stdexcept>

namespace cleanq {

/// d(s1, s2) = 1/2 ||s1 - s2||_1.
inline double trace_distance(const DensityMatrix& s1, const DensityMatrix& s2) {
  if (s1.dim() != s2.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
  return 0.5 * trace_norm(s1.matrix() - s2.matrix());
}

/// Real part of tr(s1 s2); for a pure s2 = |psi><psi| this is <psi|s1|psi>.
inline double overlap(const DensityMatrix& s1, const DensityMatrix& s2) {
  if (s1.dim() != s2.dim()) throw std::invalid_argument("overlap: dimension mismatch");
  double acc = 0.0;
  const std::size_t n = s1.dim();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const Complex x = s1(r, c), y = s2(c, r);
      acc += x.real() * y.real() - x.imag() * y.imag();
    }
  return acc;
}

/// min over pure psi of d(s, |psi><psi|), which is 1 - lambda_max(s).
inline double distance_to_pure(const DensityMatrix& s) {
  return std::clamp(1.0 - hermitian_eigenvalues(s.matrix()).back(), 0.0, 1.0);
}

inline bool is_pure(const DensityMatrix& s, double tol = 1e-9) { return std::abs(s.purity() - 1.0) <= tol; }

}  // namespace cleanq
