#pragma once

// Gate lists, their dense unitaries, Haar sampling and the named circuits:
// the Hadamard test, the SWAP staircase and repeated-interaction unfolding.

#include <cleanq/channels.hpp>
#include <cleanq/registers.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cleanq {

enum class GateKind { X, H, S, SWAP, CNOT, ControlledU, Unitary };

inline std::string_view to_string(GateKind k) {
  switch (k) {
    case GateKind::X: return "X";
    case GateKind::H: return "H";
    case GateKind::S: return "S";
    case GateKind::SWAP: return "SWAP";
    case GateKind::CNOT: return "CNOT";
    case GateKind::ControlledU: return "CU";
    case GateKind::Unitary: return "U";
  }
  return "?";
}

inline GateKind gate_kind_from_string(std::string_view s) {
  for (GateKind k : {GateKind::X, GateKind::H, GateKind::S, GateKind::SWAP, GateKind::CNOT, GateKind::ControlledU,
                     GateKind::Unitary})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown gate kind '" + std::string(s) + "'");
}

namespace gates {
inline ComplexMatrix x() { return ComplexMatrix(2, 2, {0, 1, 1, 0}); }
inline ComplexMatrix z() { return ComplexMatrix(2, 2, {1, 0, 0, -1}); }
inline ComplexMatrix h() {
  const double r = 1.0 / std::sqrt(2.0);
  return ComplexMatrix(2, 2, {r, r, r, -r});
}
inline ComplexMatrix s() { return ComplexMatrix(2, 2, {1, 0, 0, Complex(0, 1)}); }
inline ComplexMatrix swap() { return ComplexMatrix(4, 4, {1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1}); }
inline ComplexMatrix cnot() { return ComplexMatrix(4, 4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0}); }
/// |0><0| (x) I + |1><1| (x) u, control on the most significant wire.
inline ComplexMatrix controlled(const ComplexMatrix& u) {
  const std::size_t t = u.rows();
  ComplexMatrix m(2 * t, 2 * t);
  for (std::size_t i = 0; i < t; ++i) m(i, i) = 1.0;
  for (std::size_t r = 0; r < t; ++r)
    for (std::size_t c = 0; c < t; ++c) m(t + r, t + c) = u(r, c);
  return m;
}
}  // namespace gates

/// One gate. For ControlledU the first wire is the control and `matrix` acts on
/// the rest; for Unitary `matrix` acts on all listed wires (first wire = most
/// significant local bit).
struct Gate {
  GateKind kind = GateKind::X;
  std::vector<int> wires;
  std::optional<ComplexMatrix> matrix;

  /// Matrix on the gate's own wires.
  ComplexMatrix local_matrix() const {
    switch (kind) {
      case GateKind::X: return gates::x();
      case GateKind::H: return gates::h();
      case GateKind::S: return gates::s();
      case GateKind::SWAP: return gates::swap();
      case GateKind::CNOT: return gates::cnot();
      case GateKind::ControlledU: return gates::controlled(*matrix);
      case GateKind::Unitary: return *matrix;
    }
    throw std::logic_error("unreachable gate kind");
  }

  std::size_t arity() const {
    switch (kind) {
      case GateKind::X:
      case GateKind::H:
      case GateKind::S: return 1;
      case GateKind::SWAP:
      case GateKind::CNOT: return 2;
      case GateKind::ControlledU: return matrix ? 1 + static_cast<std::size_t>(log2_exact(matrix->rows())) : 0;
      case GateKind::Unitary: return matrix ? static_cast<std::size_t>(log2_exact(matrix->rows())) : 0;
    }
    return 0;
  }

  void validate(int n) const {
    const bool needs_matrix = kind == GateKind::ControlledU || kind == GateKind::Unitary;
    if (needs_matrix != matrix.has_value())
      throw std::invalid_argument(std::string("gate ") + std::string(to_string(kind)) +
                                  (needs_matrix ? " requires" : " does not take") + " a matrix");
    if (matrix && !is_unitary(*matrix))
      throw std::invalid_argument(std::string("gate ") + std::string(to_string(kind)) + " matrix is not unitary");
    if (wires.size() != arity())
      throw std::invalid_argument(std::string("gate ") + std::string(to_string(kind)) + " expects " +
                                  std::to_string(arity()) + " wires, got " + std::to_string(wires.size()));
    for (std::size_t i = 0; i < wires.size(); ++i) {
      if (wires[i] < 0 || wires[i] >= n) throw std::invalid_argument("gate wire out of range");
      for (std::size_t j = 0; j < i; ++j)
        if (wires[i] == wires[j]) throw std::invalid_argument("gate wires must be distinct");
    }
  }

  friend bool operator==(const Gate&, const Gate&) = default;
};

inline Gate gate_x(int w) { return {GateKind::X, {w}, std::nullopt}; }
inline Gate gate_h(int w) { return {GateKind::H, {w}, std::nullopt}; }
inline Gate gate_s(int w) { return {GateKind::S, {w}, std::nullopt}; }
inline Gate gate_swap(int w0, int w1) { return {GateKind::SWAP, {w0, w1}, std::nullopt}; }
inline Gate gate_cnot(int control, int target) { return {GateKind::CNOT, {control, target}, std::nullopt}; }
inline Gate gate_unitary(std::vector<int> wires, ComplexMatrix m) { return {GateKind::Unitary, std::move(wires), std::move(m)}; }
inline Gate gate_controlled(int control, std::vector<int> targets, ComplexMatrix m) {
  targets.insert(targets.begin(), control);
  return {GateKind::ControlledU, std::move(targets), std::move(m)};
}

/// Ordered gate list on n wires; gates apply first to last.
struct Circuit {
  int n = 1;
  std::vector<Gate> gates;

  Circuit() = default;
  explicit Circuit(int qubits, std::vector<Gate> g = {}) : n(qubits), gates(std::move(g)) { validate(); }

  void validate() const {
    if (n < 1) throw std::invalid_argument("circuit needs at least one qubit");
    if (n > max_qubits()) throw DimensionError("circuit exceeds qubit cap " + std::to_string(max_qubits()));
    for (const auto& g : gates) g.validate(n);
  }

  Circuit& add(Gate g) {
    g.validate(n);
    gates.push_back(std::move(g));
    return *this;
  }

  /// c1 followed by c2.
  friend Circuit operator+(Circuit c1, const Circuit& c2) {
    if (c1.n != c2.n) throw std::invalid_argument("cannot concatenate circuits on different widths");
    c1.gates.insert(c1.gates.end(), c2.gates.begin(), c2.gates.end());
    return c1;
  }

  friend bool operator==(const Circuit&, const Circuit&) = default;
};

namespace detail {

/// m <- G_embed * m where G acts on `wires` of an n-qubit index space.
inline void apply_gate_rows(ComplexMatrix& m, const ComplexMatrix& g, const std::vector<int>& wires, int n) {
  const std::size_t k = wires.size();
  const std::size_t local = std::size_t{1} << k;
  std::vector<std::size_t> offset(local, 0);
  std::size_t mask = 0;
  for (std::size_t sub = 0; sub < local; ++sub)
    for (std::size_t i = 0; i < k; ++i)
      if ((sub >> (k - 1 - i)) & 1u) offset[sub] |= std::size_t{1} << (n - 1 - wires[i]);
  for (std::size_t i = 0; i < k; ++i) mask |= std::size_t{1} << (n - 1 - wires[i]);

  const std::size_t cols = m.cols();
  std::vector<Complex> gathered(local * cols);
  for (std::size_t base = 0; base < m.rows(); ++base) {
    if (base & mask) continue;
    for (std::size_t sub = 0; sub < local; ++sub) {
      auto r = m.row(base | offset[sub]);
      std::copy(r.begin(), r.end(), gathered.begin() + static_cast<std::ptrdiff_t>(sub * cols));
    }
    for (std::size_t sub = 0; sub < local; ++sub) {
      auto out = m.row(base | offset[sub]);
      std::fill(out.begin(), out.end(), Complex{});
      for (std::size_t src = 0; src < local; ++src) {
        const Complex coeff = g(sub, src);
        if (coeff == Complex{}) continue;
        const Complex* in = gathered.data() + src * cols;
        for (std::size_t c = 0; c < cols; ++c) madd(out[c], coeff, in[c]);
      }
    }
  }
}

}  // namespace detail

/// Dense unitary of the circuit: product of gate embeddings, last gate leftmost.
inline Unitary assemble(const Circuit& circuit) {
  circuit.validate();
  ComplexMatrix u = ComplexMatrix::identity(std::size_t{1} << circuit.n);
  for (const auto& g : circuit.gates) detail::apply_gate_rows(u, g.local_matrix(), g.wires, circuit.n);
  return Unitary::assume(std::move(u));
}

/// Haar-distributed unitary on n qubits, deterministic per seed.
inline Unitary haar_random(int n, std::uint64_t seed) {
  if (n < 0 || n > max_qubits()) throw DimensionError("haar_random: qubit count outside cap");
  const std::size_t dim = std::size_t{1} << n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // column k lives at re/im[k * dim]; Gram-Schmidt keeps R's diagonal
  // positive, which is the phase convention under which Q of a Ginibre matrix is Haar.
  std::vector<double> re(dim * dim), im(dim * dim);
  for (std::size_t k = 0; k < dim * dim; ++k) {
    re[k] = normal(rng);
    im[k] = normal(rng);
  }
  std::vector<double> pr(dim), pi(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    double* vr = re.data() + k * dim;
    double* vi = im.data() + k * dim;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < k; ++j) {  // <q_j, v>
        const double* qr = re.data() + j * dim;
        const double* qi = im.data() + j * dim;
        double sr = 0.0, si = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
          sr += qr[i] * vr[i] + qi[i] * vi[i];
          si += qr[i] * vi[i] - qi[i] * vr[i];
        }
        pr[j] = sr;
        pi[j] = si;
      }
      for (std::size_t j = 0; j < k; ++j) {
        const double* qr = re.data() + j * dim;
        const double* qi = im.data() + j * dim;
        const double a = pr[j], b = pi[j];
        for (std::size_t i = 0; i < dim; ++i) {
          vr[i] -= a * qr[i] - b * qi[i];
          vi[i] -= a * qi[i] + b * qr[i];
        }
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < dim; ++i) norm += vr[i] * vr[i] + vi[i] * vi[i];
    const double inv = 1.0 / std::sqrt(norm);
    for (std::size_t i = 0; i < dim; ++i) {
      vr[i] *= inv;
      vi[i] *= inv;
    }
  }
  ComplexMatrix u(dim, dim);
  for (std::size_t c = 0; c < dim; ++c)
    for (std::size_t r = 0; r < dim; ++r) u(r, c) = Complex(re[c * dim + r], im[c * dim + r]);
  return Unitary::assume(std::move(u));
}

/// H on every wire.
inline Circuit hadamard_layer(int n) {
  Circuit c(n);
  for (int w = 0; w < n; ++w) c.add(gate_h(w));
  return c;
}

/// Moves the clean input wires onto the top of the kept register.
inline Unitary forwarding_unitary(const RegisterLayout& layout) {
  const auto perm = forwarding_permutation(layout);
  return permutation_unitary(perm, layout.n());
}

/// Unitary V with V|0...0> = |psi> (Householder reflection times a phase).
inline Unitary state_preparation_unitary(std::span<const Complex> psi) {
  if (!is_power_of_two(psi.size())) throw std::invalid_argument("state length must be a power of two");
  double norm = 0.0;
  for (const auto& z : psi) norm += std::norm(z);
  if (std::abs(std::sqrt(norm) - 1.0) > kMatrixTol) throw std::invalid_argument("state vector is not normalised");
  const std::size_t dim = psi.size();
  const Complex ph = std::abs(psi[0]) > 0 ? psi[0] / std::abs(psi[0]) : Complex(1.0);
  // reflect e0 onto y = conj(ph) psi, then multiply by ph
  std::vector<Complex> w(dim);
  double wn = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    w[i] = (i == 0 ? Complex(1.0) : Complex{}) - std::conj(ph) * psi[i];
    wn += std::norm(w[i]);
  }
  ComplexMatrix m = ComplexMatrix::identity(dim);
  if (wn > 1e-28) {
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c) m(r, c) -= 2.0 * w[r] * std::conj(w[c]) / wn;
  }
  m *= ph;
  return Unitary(std::move(m));
}

/// Step i (1-based) of the staircase: SWAP between the ancilla (wire 0) and system wire i.
inline Circuit swap_staircase(int step, int n) {
  if (step < 1 || step > n) throw std::invalid_argument("swap_staircase: step must lie in [1, n]");
  return Circuit(1 + n, {gate_swap(0, step)});
}

/// Iterated refresh scheme: each step sees a fresh `ancillas`-qubit refresh
/// state on the top wires and the running system below.
struct RepeatedInteractionPlan {
  int ancillas = 1;
  int system = 1;
  std::vector<Circuit> steps;
  std::vector<Complex> refresh;  // empty means |0...0>

  void validate() const {
    if (ancillas < 1 || system < 1) throw std::invalid_argument("plan needs at least one ancilla and one system qubit");
    if (steps.empty()) throw std::invalid_argument("plan needs at least one step");
    for (const auto& s : steps)
      if (s.n != ancillas + system)
        throw std::invalid_argument("plan step acts on " + std::to_string(s.n) + " qubits, expected " +
                                    std::to_string(ancillas + system));
    if (!refresh.empty() && refresh.size() != (std::size_t{1} << ancillas))
      throw std::invalid_argument("refresh state has the wrong length");
  }

  std::vector<Complex> refresh_state() const {
    if (!refresh.empty()) return refresh;
    std::vector<Complex> zero(std::size_t{1} << ancillas);
    zero[0] = 1.0;
    return zero;
  }
};

/// Staircase plan with `steps` rounds on n system qubits (a = 1).
inline RepeatedInteractionPlan staircase_plan(int n, int steps) {
  RepeatedInteractionPlan plan;
  plan.ancillas = 1;
  plan.system = n;
  for (int i = 1; i <= steps; ++i) plan.steps.push_back(swap_staircase(i, n));
  return plan;
}

/// Staircase generalised to a ancillas: step t swaps ancilla w with system
/// wire (t-1)a + w while that wire exists, so the system is fresh after ceil(n/a) steps.
inline RepeatedInteractionPlan block_staircase_plan(int a, int n, int steps) {
  if (a < 1 || n < 1 || steps < 1) throw std::invalid_argument("block staircase needs a, n, steps >= 1");
  RepeatedInteractionPlan plan;
  plan.ancillas = a;
  plan.system = n;
  for (int t = 1; t <= steps; ++t) {
    Circuit step(a + n);
    for (int w = 0; w < a; ++w) {
      const int target = (t - 1) * a + w;
      if (target < n) step.add(gate_swap(w, a + target));
    }
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

/// Rewrites a k-step plan as one circuit on k*a + n wires: step t acts on
/// ancilla block t and the system wires. Layout: A = C = all ancillas, B = D = system.
inline std::pair<Circuit, RegisterLayout> unfold(const RepeatedInteractionPlan& plan) {
  plan.validate();
  const int k = static_cast<int>(plan.steps.size());
  const int a = plan.ancillas;
  const int total = k * a + plan.system;
  if (total > max_qubits()) throw DimensionError("unfolded plan exceeds qubit cap " + std::to_string(max_qubits()));
  Circuit out(total);
  const bool zero_refresh = plan.refresh.empty() || std::abs(plan.refresh[0] - Complex(1.0)) <= kMatrixTol;
  if (!zero_refresh) {
    const auto prep = state_preparation_unitary(plan.refresh);
    for (int t = 0; t < k; ++t) {
      std::vector<int> block;
      for (int w = 0; w < a; ++w) block.push_back(t * a + w);
      out.add(gate_unitary(block, prep.matrix()));
    }
  }
  for (int t = 0; t < k; ++t) {
    for (Gate g : plan.steps[static_cast<std::size_t>(t)].gates) {
      for (int& w : g.wires) w = w < a ? t * a + w : k * a + (w - a);
      out.gates.push_back(std::move(g));
    }
  }
  out.validate();
  return {std::move(out), RegisterLayout(k * a, plan.system, k * a, plan.system)};
}

/// Runs the plan step by step: tensor a fresh refresh state on top, apply the
/// step, trace the ancillas out.
inline DensityMatrix simulate_sequential(const RepeatedInteractionPlan& plan, const DensityMatrix& start) {
  plan.validate();
  if (start.qubits() != plan.system) throw std::invalid_argument("start state does not match plan system size");
  const auto fresh_vec = plan.refresh_state();
  const DensityMatrix fresh = pure_state(fresh_vec);
  DensityMatrix state = start;
  for (const auto& step : plan.steps) {
    DensityMatrix full(kron(fresh.matrix(), state.matrix()));
    full = apply_unitary(full, assemble(step));
    state = partial_trace(full, plan.ancillas);
  }
  return state;
}

enum class TracePart { Real, Imaginary };

/// Monte-Carlo Hadamard test on input |0><0| (x) (1/2^n) I. Returns the
/// estimate of Re tr(U)/2^n (or Im, via an S^dagger on the clean qubit).
/// Shots run in batches of 4096; batch b draws from seed ^ b.
inline double hadamard_test(const Unitary& u, std::uint64_t shots, std::uint64_t seed, TracePart part = TracePart::Real) {
  if (shots < 1) throw std::invalid_argument("hadamard_test needs at least one shot");
  const std::size_t dim = u.dim();
  log2_exact(dim);
  // Clean-qubit branch for basis input |x>: amplitude of |0> is (|x> + phi U|x>)/2.
  const Complex phi = part == TracePart::Real ? Complex(1.0) : Complex(0.0, -1.0);
  std::vector<double> p0(dim);
  for (std::size_t x = 0; x < dim; ++x) {
    double norm = 0.0;
    for (std::size_t r = 0; r < dim; ++r) {
      const Complex amp = (r == x ? Complex(1.0) : Complex{}) + detail::mul(phi, u(r, x));
      norm += std::norm(amp);
    }
    p0[x] = std::clamp(norm / 4.0, 0.0, 1.0);
  }
  constexpr std::uint64_t kBatch = 4096;
  std::uint64_t zeros = 0;
  for (std::uint64_t b = 0, done = 0; done < shots; ++b) {
    const std::uint64_t count = std::min(kBatch, shots - done);
    std::mt19937_64 rng(seed ^ b);
    std::uniform_int_distribution<std::size_t> pick(0, dim - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (std::uint64_t s = 0; s < count; ++s) {
      const std::size_t x = pick(rng);
      if (coin(rng) < p0[x]) ++zeros;
    }
    done += count;
  }
  return 2.0 * static_cast<double>(zeros) / static_cast<double>(shots) - 1.0;
}

}  // namespace cleanq
