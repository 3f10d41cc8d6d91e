#pragma once

// The discarding channel sigma -> tr_C U sigma U^dagger, the measuring channel
// that reads C in the computational basis, and the direct entry formula for
// the (0,0) element of the discarding channel on the DQC input.

#include <cleanq/distance.hpp>
#include <cleanq/registers.hpp>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cleanq {

/// Outcomes with p_j at or below this are treated as impossible and carry no post-state.
inline constexpr double kZeroProbability = 1e-12;

struct MeasurementOutcome {
  std::size_t index = 0;                  // j, basis label of C
  double probability = 0.0;               // p_j
  std::optional<DensityMatrix> post_state;  // S_j on D, absent when p_j <= kZeroProbability
};

/// Traces out the top `traced` qubits: out(y, y') = sum_j sigma(jD + y, jD + y').
inline DensityMatrix partial_trace(const DensityMatrix& sigma, int traced) {
  if (traced < 0 || traced > sigma.qubits()) throw std::invalid_argument("partial_trace: traced count out of range");
  const std::size_t kept = std::size_t{1} << (sigma.qubits() - traced);
  const std::size_t blocks = std::size_t{1} << traced;
  ComplexMatrix out(kept, kept);
  for (std::size_t j = 0; j < blocks; ++j)
    for (std::size_t y = 0; y < kept; ++y)
      for (std::size_t yp = 0; yp < kept; ++yp) out(y, yp) += sigma(j * kept + y, j * kept + yp);
  return DensityMatrix(std::move(out));
}

/// Traces out the bottom `traced` qubits: out(j, j') = sum_y sigma(jD + y, j'D + y).
inline DensityMatrix partial_trace_bottom(const DensityMatrix& sigma, int traced) {
  if (traced < 0 || traced > sigma.qubits()) throw std::invalid_argument("partial_trace_bottom: traced count out of range");
  const std::size_t inner = std::size_t{1} << traced;
  const std::size_t kept = std::size_t{1} << (sigma.qubits() - traced);
  ComplexMatrix out(kept, kept);
  for (std::size_t j = 0; j < kept; ++j)
    for (std::size_t jp = 0; jp < kept; ++jp)
      for (std::size_t y = 0; y < inner; ++y) out(j, jp) += sigma(j * inner + y, jp * inner + y);
  return DensityMatrix(std::move(out));
}

namespace detail {

inline void hermitize(ComplexMatrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    m(r, r) = m(r, r).real();
    for (std::size_t c = r + 1; c < m.cols(); ++c) {
      const Complex avg = 0.5 * (m(r, c) + std::conj(m(c, r)));
      m(r, c) = avg;
      m(c, r) = std::conj(avg);
    }
  }
}

/// The unnormalised branches T_j = (<j|_C (x) I_D) U sigma U^dagger (|j>_C (x) I_D).
/// Only the diagonal D x D blocks of U sigma U^dagger are formed.
inline std::vector<ComplexMatrix> conjugated_blocks(const Unitary& u, const DensityMatrix& sigma, int c) {
  if (u.dim() != sigma.dim()) throw std::invalid_argument("channel: unitary and state dimensions differ");
  const int n = sigma.qubits();
  if (c < 0 || c > n) throw std::invalid_argument("channel: measured register larger than the system");
  const std::size_t N = sigma.dim();
  const std::size_t D = std::size_t{1} << (n - c);
  const std::size_t C = std::size_t{1} << c;

  // W = sigma U^dagger, row k: W(k, col) = sum_l sigma(k, l) conj(U(col, l))
  const ComplexMatrix ud = dagger(u.matrix());
  ComplexMatrix w(N, N);
  std::vector<bool> live(N, false);
  for (std::size_t k = 0; k < N; ++k) {
    auto wrow = w.row(k);
    for (std::size_t l = 0; l < N; ++l) {
      const Complex s = sigma(k, l);
      if (s == Complex{}) continue;
      live[k] = true;
      auto urow = ud.row(l);
      for (std::size_t col = 0; col < N; ++col) madd(wrow[col], s, urow[col]);
    }
  }
  std::vector<std::size_t> live_rows;
  for (std::size_t k = 0; k < N; ++k)
    if (live[k]) live_rows.push_back(k);

  std::vector<ComplexMatrix> blocks;
  blocks.reserve(C);
  for (std::size_t j = 0; j < C; ++j) {
    ComplexMatrix t(D, D);
    for (std::size_t y = 0; y < D; ++y) {
      auto urow = u.matrix().row(j * D + y);
      auto trow = t.row(y);
      for (std::size_t k : live_rows) {
        const Complex uk = urow[k];
        if (uk == Complex{}) continue;
        const Complex* wk = w.row(k).data() + j * D;
        for (std::size_t yp = 0; yp < D; ++yp) madd(trow[yp], uk, wk[yp]);
      }
    }
    hermitize(t);
    blocks.push_back(std::move(t));
  }
  return blocks;
}

}  // namespace detail

/// U sigma U^dagger.
inline DensityMatrix apply_unitary(const DensityMatrix& sigma, const Unitary& u) {
  if (u.dim() != sigma.dim()) throw std::invalid_argument("apply_unitary: dimension mismatch");
  return DensityMatrix(std::move(detail::conjugated_blocks(u, sigma, 0).front()));
}

/// Rejects u unless it is unitary to 1e-10.
inline DensityMatrix apply_unitary(const DensityMatrix& sigma, const ComplexMatrix& u) {
  return apply_unitary(sigma, Unitary(u));
}

/// E_{U,C}(sigma) = tr_C U sigma U^dagger with C the top layout.c wires.
inline DensityMatrix discarding_channel(const Unitary& u, const RegisterLayout& layout, const DensityMatrix& sigma) {
  if (sigma.qubits() != layout.n()) throw std::invalid_argument("discarding_channel: state does not match layout");
  auto blocks = detail::conjugated_blocks(u, sigma, layout.c);
  ComplexMatrix out = std::move(blocks.front());
  for (std::size_t j = 1; j < blocks.size(); ++j) out += blocks[j];
  return DensityMatrix(std::move(out));
}

/// One entry of E_{U,C}(sigma): sum_j sum_{k,l} U(jD+y, k) sigma(k, l) conj(U(jD+y', l)).
inline Complex discarding_channel_entry(const Unitary& u, const RegisterLayout& layout, const DensityMatrix& sigma,
                                        std::size_t y, std::size_t yp) {
  if (sigma.qubits() != layout.n()) throw std::invalid_argument("discarding_channel_entry: state does not match layout");
  if (u.dim() != sigma.dim()) throw std::invalid_argument("discarding_channel_entry: unitary and state dimensions differ");
  if (y >= layout.D() || yp >= layout.D()) throw std::invalid_argument("discarding_channel_entry: index out of range");
  struct Term {
    std::size_t k, l;
    Complex s;
  };
  std::vector<Term> terms;
  for (std::size_t k = 0; k < sigma.dim(); ++k)
    for (std::size_t l = 0; l < sigma.dim(); ++l)
      if (sigma(k, l) != Complex{}) terms.push_back({k, l, sigma(k, l)});
  Complex acc{};
  for (std::size_t j = 0; j < layout.C(); ++j) {
    auto row = u.matrix().row(j * layout.D() + y);
    auto rowp = u.matrix().row(j * layout.D() + yp);
    for (const auto& t : terms) detail::madd_conj(acc, detail::mul(row[t.k], t.s), rowp[t.l]);
  }
  return acc;
}

/// Computational-basis measurement of C after U; one outcome per j in [0, C).
inline std::vector<MeasurementOutcome> measuring_channel(const Unitary& u, const RegisterLayout& layout,
                                                         const DensityMatrix& sigma) {
  if (sigma.qubits() != layout.n()) throw std::invalid_argument("measuring_channel: state does not match layout");
  auto blocks = detail::conjugated_blocks(u, sigma, layout.c);
  std::vector<MeasurementOutcome> outcomes;
  outcomes.reserve(blocks.size());
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    MeasurementOutcome o;
    o.index = j;
    o.probability = std::max(0.0, blocks[j].trace().real());
    if (o.probability > kZeroProbability) {
      blocks[j] *= 1.0 / o.probability;
      o.post_state.emplace(std::move(blocks[j]));
    }
    outcomes.push_back(std::move(o));
  }
  return outcomes;
}

/// (1/B) sum_{j < C} sum_{x < B} |u_{jD, x}|^2, read straight off the entries of U.
inline double entry00_direct(const Unitary& u, const RegisterLayout& layout) {
  if (u.dim() != layout.N()) throw std::invalid_argument("entry00_direct: unitary does not match layout");
  double s = 0.0;
  for (std::size_t j = 0; j < layout.C(); ++j)
    for (std::size_t x = 0; x < layout.B(); ++x) s += std::norm(u(j * layout.D(), x));
  return s / static_cast<double>(layout.B());
}

/// sum_j S_j(0,0) p_j, the entry-level quantity that upper-bounds the pure-outcome probability.
inline double weighted_entry00(const std::vector<MeasurementOutcome>& outcomes) {
  double s = 0.0;
  for (const auto& o : outcomes)
    if (o.post_state) s += o.probability * (*o.post_state)(0, 0).real();
  return s;
}

/// Total probability of outcomes whose post-state is within eps_prime (trace
/// distance, plus 1e-9 slack) of the pure target.
inline double pure_outcome_probability(const std::vector<MeasurementOutcome>& outcomes, const DensityMatrix& target,
                                       double eps_prime) {
  if (!is_pure(target)) throw std::invalid_argument("pure_outcome_probability: target is not pure");
  if (eps_prime < 0.0 || eps_prime >= 1.0) throw std::invalid_argument("pure_outcome_probability: eps' must lie in [0, 1)");
  constexpr double kSlack = 1e-9;
  double total = 0.0;
  for (const auto& o : outcomes) {
    if (!o.post_state) continue;
    if (o.post_state->dim() != target.dim()) throw std::invalid_argument("pure_outcome_probability: target dimension");
    // d(S, |psi><psi|) >= 1 - <psi|S|psi>, so low-fidelity outcomes need no eigensolve
    if (1.0 - overlap(*o.post_state, target) > eps_prime + kSlack) continue;
    if (trace_distance(*o.post_state, target) <= eps_prime + kSlack) total += o.probability;
  }
  return total;
}

/// Total probability of outcomes within eps_prime (plus 1e-9) of some pure
/// state, each outcome free to pick its own.
inline double close_to_pure_probability(const std::vector<MeasurementOutcome>& outcomes, double eps_prime) {
  if (eps_prime < 0.0 || eps_prime >= 1.0) throw std::invalid_argument("close_to_pure_probability: eps' must lie in [0, 1)");
  constexpr double kSlack = 1e-9;
  double total = 0.0;
  for (const auto& o : outcomes) {
    if (!o.post_state) continue;
    // lambda_max <= sqrt(purity)
    if (1.0 - std::sqrt(o.post_state->purity()) > eps_prime + kSlack) continue;
    if (distance_to_pure(*o.post_state) <= eps_prime + kSlack) total += o.probability;
  }
  return total;
}

}  // namespace cleanq
