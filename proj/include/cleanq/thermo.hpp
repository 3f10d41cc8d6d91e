#pragma once

// Gibbs states, partition functions, gaps, entropy and the state perturbation
// sampler used by the noise-robustness checks.

#include <cleanq/channels.hpp>
#include <cleanq/circuits.hpp>
#include <cleanq/distance.hpp>
#include <cleanq/registers.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cleanq {

/// Hermitian operator on d qubits.
class Hamiltonian {
 public:
  explicit Hamiltonian(ComplexMatrix m) : m_(std::move(m)) {
    if (!m_.square()) throw std::invalid_argument("Hamiltonian must be square");
    qubits_ = log2_exact(m_.rows());
    if (!is_hermitian(m_)) throw std::invalid_argument("Hamiltonian must be Hermitian");
  }

  static Hamiltonian diagonal(std::span<const double> energies) {
    return Hamiltonian(ComplexMatrix::diagonal(energies));
  }
  static Hamiltonian diagonal(std::initializer_list<double> energies) {
    return Hamiltonian(ComplexMatrix::diagonal(energies));
  }

  int qubits() const { return qubits_; }
  std::size_t dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  ComplexMatrix m_;
  int qubits_ = 0;
};

struct GapInfo {
  double ground_energy = 0.0;
  double gap = 0.0;  // 0 when degenerate, +inf for a 1-dimensional space
  std::vector<Complex> ground_state;
  bool degenerate = false;
};

/// Eigenvalues closer than this count as equal.
inline constexpr double kDistinctTol = 1e-9;

inline GapInfo spectral_gap(const Hamiltonian& h) {
  const auto e = hermitian_eig(h.matrix());
  GapInfo g;
  g.ground_energy = e.eigenvalues.front();
  g.ground_state.resize(h.dim());
  for (std::size_t r = 0; r < h.dim(); ++r) g.ground_state[r] = e.eigenvectors(r, 0);
  if (e.eigenvalues.size() == 1) {
    g.gap = std::numeric_limits<double>::infinity();
    return g;
  }
  const double next = e.eigenvalues[1];
  if (next - g.ground_energy <= kDistinctTol) {
    g.degenerate = true;
    g.gap = 0.0;
  } else {
    g.gap = next - g.ground_energy;
  }
  return g;
}

/// sum_i exp(-beta (lambda_i - lambda_min)); the ground shift leaves G_beta unchanged.
inline double partition_function(const Hamiltonian& h, double beta) {
  if (!std::isfinite(beta)) throw std::invalid_argument("beta must be finite");
  const auto ev = hermitian_eigenvalues(h.matrix());
  double z = 0.0;
  for (double l : ev) z += std::exp(-beta * std::max(0.0, l - ev.front()));
  return z;
}

/// exp(-beta H) / tr exp(-beta H).
inline DensityMatrix gibbs_state(const Hamiltonian& h, double beta) {
  if (!std::isfinite(beta) || beta < 0) throw std::invalid_argument("beta must be finite and non-negative");
  const auto e = hermitian_eig(h.matrix());
  const double ground = e.eigenvalues.front();
  double z = 0.0;
  for (double l : e.eigenvalues) z += std::exp(-beta * std::max(0.0, l - ground));
  ComplexMatrix g = spectral_apply(e, [&](double l) { return std::exp(-beta * std::max(0.0, l - ground)) / z; });
  detail::hermitize(g);
  return DensityMatrix(std::move(g));
}

/// Inverse temperature above which G_beta is eps'-close to the ground state:
/// (d ln 2 + ln((1 - eps')/eps')) / gamma.
inline double beta_threshold(int d, double gamma, double eps_prime) {
  if (!(gamma > 0)) throw std::invalid_argument("beta_threshold needs a positive gap");
  if (!(eps_prime > 0 && eps_prime < 1)) throw std::invalid_argument("beta_threshold needs eps' in (0, 1)");
  if (d < 0) throw std::invalid_argument("beta_threshold needs d >= 0");
  return (d * std::log(2.0) + std::log((1 - eps_prime) / eps_prime)) / gamma;
}

/// Eigenvalues in [-tol, 0) are clamped to zero; anything more negative is rejected.
inline std::vector<double> state_spectrum(const DensityMatrix& s) {
  auto ev = hermitian_eigenvalues(s.matrix());
  for (double& l : ev) {
    if (l < -kMatrixTol) throw std::invalid_argument("state has a negative eigenvalue " + std::to_string(l));
    if (l < 0) l = 0;
  }
  return ev;
}

/// -tr(rho log2 rho), in qubits.
inline double von_neumann_entropy(const DensityMatrix& s) {
  double h = 0.0;
  for (double l : state_spectrum(s))
    if (l > 1e-12) h -= l * std::log2(l);
  return std::max(0.0, h);
}

struct ArakiLieb {
  double lhs = 0.0;  // H(sigma)
  double rhs = 0.0;  // H(tr_C sigma) + H(tr_D sigma)
};

/// C is the top c qubits, D the rest.
inline ArakiLieb araki_lieb_check(const DensityMatrix& sigma, int c) {
  if (c < 0 || c > sigma.qubits()) throw std::invalid_argument("araki_lieb_check: c out of range");
  const int d = sigma.qubits() - c;
  return {von_neumann_entropy(sigma),
          von_neumann_entropy(partial_trace(sigma, c)) + von_neumann_entropy(partial_trace_bottom(sigma, d))};
}

/// G G^dagger / tr for a Ginibre G of the given rank (0 = full rank).
inline DensityMatrix random_density_matrix(int n, std::uint64_t seed, std::size_t rank = 0) {
  const std::size_t dim = std::size_t{1} << n;
  if (rank == 0 || rank > dim) rank = dim;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(dim, rank);
  for (auto& z : g.data()) z = Complex(normal(rng), normal(rng));
  ComplexMatrix m = mul_adjoint(g, g);
  m *= 1.0 / m.trace().real();
  detail::hermitize(m);
  return DensityMatrix(std::move(m));
}

/// Random state whose rank is itself drawn uniformly from [1, 2^n].
inline DensityMatrix random_mixed_state(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<std::size_t> rank(1, std::size_t{1} << n);
  return random_density_matrix(n, seed, rank(rng));
}

struct Perturbation {
  DensityMatrix state;
  double weight = 0.0;    // p in (1 - p) sigma + p tau
  double distance = 0.0;  // d(sigma, state) = p d(sigma, tau)
};

/// (1 - p) sigma + p tau with p the largest weight keeping the distance below eps.
inline Perturbation perturb_toward(const DensityMatrix& sigma, const DensityMatrix& tau, double eps) {
  if (!(eps >= 0 && eps <= 1)) throw std::invalid_argument("perturb: eps must lie in [0, 1]");
  if (sigma.dim() != tau.dim()) throw std::invalid_argument("perturb: dimension mismatch");
  if (eps == 0) return {sigma, 0.0, 0.0};
  const double d0 = trace_distance(sigma, tau);
  // shrink by 1e-9 so rounding cannot push the realised distance past eps
  const double p = d0 > 0 ? std::min(1.0, eps * (1 - 1e-9) / d0) : 0.0;
  ComplexMatrix m = sigma.matrix() * (1 - p) + tau.matrix() * p;
  detail::hermitize(m);
  return {DensityMatrix(std::move(m)), p, p * d0};
}

/// Convex mixing with a seeded random state.
inline Perturbation perturb(const DensityMatrix& sigma, double eps, std::uint64_t seed) {
  return perturb_toward(sigma, random_mixed_state(sigma.qubits(), seed), eps);
}

/// Diagonal Hamiltonian on d qubits with a unique ground level 0 at a random
/// position, one level exactly gamma, and the rest uniform in [gamma, gamma + 3].
inline Hamiltonian random_gapped_diagonal(int d, double gamma, std::uint64_t seed) {
  if (!(gamma > 0)) throw std::invalid_argument("gap must be positive");
  const std::size_t dim = std::size_t{1} << d;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> level(gamma, gamma + 3.0);
  std::vector<double> e(dim);
  for (auto& x : e) x = level(rng);
  e[0] = 0.0;
  if (dim > 1) e[1] = gamma;
  std::shuffle(e.begin(), e.end(), rng);
  return Hamiltonian::diagonal(e);
}

/// Projector onto the ground state of a gapped Hamiltonian.
inline DensityMatrix ground_projector(const Hamiltonian& h) {
  const auto g = spectral_gap(h);
  if (g.degenerate) throw std::invalid_argument("ground state is degenerate");
  return pure_state(g.ground_state);
}

}  // namespace cleanq
