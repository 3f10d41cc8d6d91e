#pragma once

// One checker per bound. Each evaluates the bound over a Haar ensemble plus a
// fixed list of structured circuits and returns a BoundReport; the saturation
// search probes how tight the bounds are.

#include <cleanq/channels.hpp>
#include <cleanq/circuits.hpp>
#include <cleanq/distance.hpp>
#include <cleanq/registers.hpp>
#include <cleanq/thermo.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cleanq {

enum class TheoremId { THM_TR, COR_MEAS, LEM_00, PROP_ERR_A, PROP_ERR_B, LEM_GIBBS, COR_GIBBS, COR_CDL, ENTROPIC, ARAKI_LIEB };

inline constexpr TheoremId kAllTheorems[] = {TheoremId::THM_TR,     TheoremId::COR_MEAS,  TheoremId::LEM_00,
                                              TheoremId::PROP_ERR_A, TheoremId::PROP_ERR_B, TheoremId::LEM_GIBBS,
                                              TheoremId::COR_GIBBS,  TheoremId::COR_CDL,   TheoremId::ENTROPIC,
                                              TheoremId::ARAKI_LIEB};

inline std::string_view to_string(TheoremId t) {
  switch (t) {
    case TheoremId::THM_TR: return "THM_TR";
    case TheoremId::COR_MEAS: return "COR_MEAS";
    case TheoremId::LEM_00: return "LEM_00";
    case TheoremId::PROP_ERR_A: return "PROP_ERR_A";
    case TheoremId::PROP_ERR_B: return "PROP_ERR_B";
    case TheoremId::LEM_GIBBS: return "LEM_GIBBS";
    case TheoremId::COR_GIBBS: return "COR_GIBBS";
    case TheoremId::COR_CDL: return "COR_CDL";
    case TheoremId::ENTROPIC: return "ENTROPIC";
    case TheoremId::ARAKI_LIEB: return "ARAKI_LIEB";
  }
  return "?";
}

inline TheoremId theorem_from_string(std::string_view s) {
  for (TheoremId t : kAllTheorems)
    if (to_string(t) == s) return t;
  throw std::invalid_argument("unknown theorem id '" + std::string(s) + "'");
}

/// observed > bound + kViolationTol counts as a violation.
inline constexpr double kViolationTol = 1e-9;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for stream `index` under a parent seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) { return splitmix64(seed ^ splitmix64(index)); }

/// A secondary assertion inside a report.
struct SubCheck {
  enum class Kind { Upper, Lower, Equal };

  std::string name;
  double observed = 0.0;
  double bound = 0.0;
  double tol = kViolationTol;
  Kind kind = Kind::Upper;

  bool violated() const {
    switch (kind) {
      case Kind::Upper: return !(observed <= bound + tol);
      case Kind::Lower: return !(observed >= bound - tol);
      case Kind::Equal: return !(std::abs(observed - bound) <= tol);
    }
    return true;
  }
};

inline std::string_view to_string(SubCheck::Kind k) {
  switch (k) {
    case SubCheck::Kind::Upper: return "<=";
    case SubCheck::Kind::Lower: return ">=";
    case SubCheck::Kind::Equal: return "==";
  }
  return "?";
}

/// Register layout (when there is one) plus named scalar parameters in insertion order.
struct ReportConfig {
  std::optional<RegisterLayout> layout;
  std::vector<std::pair<std::string, double>> params;

  ReportConfig& set(std::string key, double value) {
    for (auto& [k, v] : params)
      if (k == key) {
        v = value;
        return *this;
      }
    params.emplace_back(std::move(key), value);
    return *this;
  }

  std::optional<double> get(std::string_view key) const {
    for (const auto& [k, v] : params)
      if (k == key) return v;
    return std::nullopt;
  }
};

struct BoundReport {
  TheoremId theorem = TheoremId::THM_TR;
  ReportConfig config;
  double observed = 0.0;
  double bound = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  bool precondition_met = true;  // false: nothing was asserted
  std::deque<SubCheck> checks;  // deque: check() hands out stable references
  std::vector<std::string> notes;
  std::vector<double> per_trial;  // one observed value per evaluated unitary or state

  double margin() const { return bound - observed; }
  bool violated() const { return precondition_met && observed > bound + kViolationTol; }
  bool any_violation() const {
    if (violated()) return true;
    return std::any_of(checks.begin(), checks.end(), [](const SubCheck& c) { return c.violated(); });
  }

  SubCheck& check(std::string name, double bound_value, SubCheck::Kind kind = SubCheck::Kind::Upper,
                  double tol = kViolationTol) {
    for (auto& c : checks)
      if (c.name == name) return c;
    const double start = kind == SubCheck::Kind::Upper ? -std::numeric_limits<double>::infinity()
                         : kind == SubCheck::Kind::Lower ? std::numeric_limits<double>::infinity()
                                                         : bound_value;
    checks.push_back({std::move(name), start, bound_value, tol, kind});
    return checks.back();
  }
};

namespace detail {

inline void raise(SubCheck& c, double v) { c.observed = std::max(c.observed, v); }
// Equality checks track the value furthest from the target.
inline void track(SubCheck& c, double v) {
  if (std::abs(v - c.bound) > std::abs(c.observed - c.bound)) c.observed = v;
}

inline void finish_unused(BoundReport& r) {
  for (auto& c : r.checks)
    if (!std::isfinite(c.observed)) c.observed = c.bound;
}

inline void require_eps_prime_below_half(double eps_prime) {
  if (!(eps_prime >= 0.0 && eps_prime < 0.5)) throw std::invalid_argument("eps' must lie in [0, 1/2)");
}

inline void require_eps(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in [0, 1]");
}

inline void require_nogo_regime(const RegisterLayout& l) {
  if (l.d <= l.a) throw std::invalid_argument("this check needs d > a (" + to_string(l) + ")");
}

/// A unitary with a name for reports.
struct Labelled {
  std::string label;
  Unitary u;
};

}  // namespace detail

/// Haar unitaries on n qubits, entry t seeded by derive_seed(seed, t).
inline std::vector<Unitary> haar_pool(int n, std::size_t count, std::uint64_t seed) {
  std::vector<Unitary> pool;
  pool.reserve(count);
  for (std::size_t t = 0; t < count; ++t) pool.push_back(haar_random(n, derive_seed(seed, t)));
  return pool;
}

/// Pairs wire i with wire c + i by SWAP gates for i < min(a, d).
inline Circuit staircase_forwarding(const RegisterLayout& l) {
  Circuit circ(l.n());
  // descending, so a clean qubit is never moved twice when c < a
  for (int i = std::min(l.a, l.d) - 1; i >= 0; --i)
    if (l.c > 0) circ.add(gate_swap(i, l.c + i));
  return circ;
}

/// Sends |0...0>_A (x) |x>_B to basis states chosen so that as many C outcomes
/// as possible leave a pure D: the first o blocks receive one input each, the
/// remaining inputs fill the other blocks. o is exact_pure_ceiling(l) * B.
inline Unitary pure_packing_unitary(const RegisterLayout& l);

/// Largest probability of an exactly pure measured outcome on the DQC input
/// when each outcome may target its own pure state: o/B with o the most
/// outcomes that can have rank-one branches, o = min(C, floor((N - B)/(D - 1))).
inline double exact_pure_ceiling(const RegisterLayout& l) {
  if (l.D() == 1) return 1.0;
  const std::size_t o = std::min(l.C(), (l.N() - l.B()) / (l.D() - 1));
  return static_cast<double>(o) / static_cast<double>(l.B());
}

inline Unitary pure_packing_unitary(const RegisterLayout& l) {
  const std::size_t N = l.N(), B = l.B(), C = l.C(), D = l.D();
  const std::size_t o = D == 1 ? C : std::min(C, (N - B) / (D - 1));
  std::vector<std::size_t> image;  // image[x] for the first B inputs
  std::vector<bool> used(N, false);
  for (std::size_t j = 0; j < o && image.size() < B; ++j) image.push_back(j * D);
  for (std::size_t j = o; j < C && image.size() < B; ++j)
    for (std::size_t y = 0; y < D && image.size() < B; ++y) image.push_back(j * D + y);
  for (auto x : image) used[x] = true;
  ComplexMatrix m(N, N);
  std::size_t next = 0;
  for (std::size_t x = 0; x < N; ++x) {
    std::size_t y;
    if (x < B) {
      y = image[x];
    } else {
      while (used[next]) ++next;
      y = next;
      used[next] = true;
    }
    m(y, x) = 1.0;
  }
  return Unitary::assume(std::move(m));
}

/// Identity, SWAP forwarding (one permutation and as a ladder of SWAPs),
/// Hadamard layers and their compositions. With a D-register target vector the
/// list also contains forwarding followed by a rotation of D onto the target.
inline std::vector<detail::Labelled> structured_unitaries(const RegisterLayout& l,
                                                          std::span<const Complex> d_target = {}) {
  const int n = l.n();
  const Unitary fwd = forwarding_unitary(l);
  const Unitary had = assemble(hadamard_layer(n));
  std::vector<detail::Labelled> out;
  out.push_back({"identity", Unitary::identity(l.N())});
  out.push_back({"forwarding", fwd});
  out.push_back({"staircase", assemble(staircase_forwarding(l))});
  out.push_back({"hadamard", had});
  out.push_back({"hadamard+forwarding", fwd * had});
  out.push_back({"forwarding+hadamard", had * fwd});
  out.push_back({"pure-packing", pure_packing_unitary(l)});
  if (!d_target.empty()) {
    if (d_target.size() != l.D()) throw std::invalid_argument("structured_unitaries: target does not match D");
    std::vector<int> wires;
    for (int w = l.c; w < n; ++w) wires.push_back(w);
    const Unitary rot = assemble(Circuit(n, {gate_unitary(wires, state_preparation_unitary(d_target).matrix())}));
    out.push_back({"forwarding+rotate", rot * fwd});
  }
  return out;
}

namespace detail {

inline std::vector<Labelled> ensemble(std::span<const Unitary> pool, std::vector<Labelled> structured) {
  std::vector<Labelled> all;
  all.reserve(pool.size() + structured.size());
  for (std::size_t t = 0; t < pool.size(); ++t) all.push_back({"haar#" + std::to_string(t), pool[t]});
  for (auto& s : structured) all.push_back(std::move(s));
  return all;
}

inline void note_argmax(BoundReport& r, const std::vector<Labelled>& all) {
  if (r.per_trial.empty()) return;
  const auto it = std::max_element(r.per_trial.begin(), r.per_trial.end());
  r.notes.push_back("max attained by " + all[static_cast<std::size_t>(it - r.per_trial.begin())].label);
}

inline void note_regime(BoundReport& r, const RegisterLayout& l) {
  if (l.d > l.a)
    r.notes.push_back("regime: no-go (d > a)");
  else
    r.notes.push_back("regime: forwarding possible (d <= a), bound is at least 1");
}

}  // namespace detail

/// Max (0,0) entry of the discarding channel output on the DQC input.
/// Each trial also compares the channel entry with entry00_direct.
inline BoundReport check_discard_nogo(const RegisterLayout& layout, std::span<const Unitary> pool, std::uint64_t seed) {
  BoundReport r;
  r.theorem = TheoremId::THM_TR;
  r.config.layout = layout;
  r.seed = seed;
  r.trials = pool.size();
  r.bound = layout.clean_ratio();
  for (const auto& u : pool)
    if (u.dim() != layout.N()) throw std::invalid_argument("check_discard_nogo: pool does not match layout");
  const auto all = detail::ensemble(pool, structured_unitaries(layout));
  r.config.set("structured", static_cast<double>(all.size() - pool.size()));
  const DensityMatrix rho = dqc_input(layout);
  auto& identity = r.check("entry00_direct == channel entry", 0.0, SubCheck::Kind::Upper, 1e-10);
  auto& full = r.check("full channel == single-entry evaluation", 0.0, SubCheck::Kind::Upper, 1e-10);
  r.observed = -1.0;
  for (std::size_t t = 0; t < all.size(); ++t) {
    const Unitary& u = all[t].u;
    const double entry = discarding_channel_entry(u, layout, rho, 0, 0).real();
    detail::raise(identity, std::abs(entry - entry00_direct(u, layout)));
    if (t == 0 || t >= pool.size())
      detail::raise(full, std::abs(discarding_channel(u, layout, rho)(0, 0).real() - entry));
    r.per_trial.push_back(entry);
    r.observed = std::max(r.observed, entry);
  }
  detail::finish_unused(r);
  detail::note_regime(r, layout);
  detail::note_argmax(r, all);
  return r;
}

inline BoundReport check_discard_nogo(const RegisterLayout& layout, std::size_t trials, std::uint64_t seed) {
  const auto pool = haar_pool(layout.n(), trials, seed);
  return check_discard_nogo(layout, pool, seed);
}

/// Max probability that measuring C leaves D within eps' of |0...0>.
inline BoundReport check_measure_bound(const RegisterLayout& layout, std::span<const Unitary> pool, std::uint64_t seed,
                                       double eps_prime = 0.0) {
  detail::require_eps_prime_below_half(eps_prime);
  BoundReport r;
  r.theorem = TheoremId::COR_MEAS;
  r.config.layout = layout;
  r.config.set("eps_prime", eps_prime);
  r.seed = seed;
  r.trials = pool.size();
  r.bound = eps_prime == 0.0 ? layout.clean_ratio() : layout.clean_ratio() / (1 - 2 * eps_prime);
  const auto all = detail::ensemble(pool, structured_unitaries(layout));
  r.config.set("structured", static_cast<double>(all.size() - pool.size()));
  const DensityMatrix rho = dqc_input(layout);
  const DensityMatrix target = basis_state(layout.d, 0);
  auto& chain = r.check("sum_j p_j S_j(0,0) <= 2^(a-d)", layout.clean_ratio());
  auto& link = r.check("sum_j p_j S_j(0,0) == entry00_direct", 0.0, SubCheck::Kind::Upper, 1e-10);
  auto& pure_le = r.check("(1-2eps') P(close to |0>) - sum_j p_j S_j(0,0) <= 0", 0.0);
  auto& any = r.check("P(close to any pure state) <= bound", r.bound);
  r.observed = -1.0;
  for (const auto& [label, u] : all) {
    const auto outs = measuring_channel(u, layout, rho);
    const double p = pure_outcome_probability(outs, target, eps_prime);
    const double w = weighted_entry00(outs);
    const double q = close_to_pure_probability(outs, eps_prime);
    detail::raise(chain, w);
    detail::raise(link, std::abs(w - entry00_direct(u, layout)));
    detail::raise(pure_le, (1 - 2 * eps_prime) * p - w);
    detail::raise(any, q);
    r.per_trial.push_back(p);
    r.observed = std::max(r.observed, p);
  }
  r.config.set("exact_pure_ceiling", exact_pure_ceiling(layout));
  detail::finish_unused(r);
  detail::note_regime(r, layout);
  detail::note_argmax(r, all);
  return r;
}

inline BoundReport check_measure_bound(const RegisterLayout& layout, std::size_t trials, std::uint64_t seed,
                                       double eps_prime = 0.0) {
  const auto pool = haar_pool(layout.n(), trials, seed);
  return check_measure_bound(layout, pool, seed, eps_prime);
}

/// Max |(tr_F (sigma - sigma'))(0,0)| over pairs with d(sigma, sigma') <= eps.
/// Trials cycle the perturbation direction through |0...0>, a random mixed
/// state and a random pure state.
inline BoundReport check_lemma00(int n, int f, double eps, std::size_t trials, std::uint64_t seed) {
  if (f < 0 || f > n) throw std::invalid_argument("check_lemma00: traced count must lie in [0, n]");
  detail::require_eps(eps);
  BoundReport r;
  r.theorem = TheoremId::LEM_00;
  r.config.set("n", n).set("f", f).set("eps", eps);
  r.seed = seed;
  r.trials = trials;
  r.bound = 2 * eps;
  auto& dist = r.check("d(sigma, sigma') <= eps", eps);
  auto& opnorm = r.check("||sigma - sigma'||_op - 2 d(sigma, sigma') <= 0", 0.0);
  r.observed = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const DensityMatrix sigma = random_mixed_state(n, derive_seed(seed, 2 * t));
    const std::uint64_t s2 = derive_seed(seed, 2 * t + 1);
    const DensityMatrix tau = t % 3 == 0 ? basis_state(n, 0)
                              : t % 3 == 1 ? random_mixed_state(n, s2)
                                           : random_density_matrix(n, s2, 1);
    const auto pert = perturb_toward(sigma, tau, eps);
    const auto ev = hermitian_eigenvalues(sigma.matrix() - pert.state.matrix());
    double l1 = 0.0, op = 0.0;
    for (double l : ev) {
      l1 += std::abs(l);
      op = std::max(op, std::abs(l));
    }
    detail::raise(dist, 0.5 * l1);
    detail::raise(opnorm, op - l1);
    const double entry = std::abs(partial_trace(sigma, f)(0, 0) - partial_trace(pert.state, f)(0, 0));
    r.per_trial.push_back(entry);
    r.observed = std::max(r.observed, entry);
  }
  detail::finish_unused(r);
  return r;
}

namespace detail {

inline DensityMatrix perturbation_direction(const RegisterLayout& l, std::size_t t, std::uint64_t seed) {
  if (t % 3 == 0) return basis_state(l.n(), 0);
  if (t % 3 == 1) return random_mixed_state(l.n(), seed);
  return random_density_matrix(l.n(), seed, 1);
}

}  // namespace detail

/// Noise-robust versions of the discard and measurement bounds on inputs
/// within eps of the DQC input. Returns the discarding report first.
inline std::pair<BoundReport, BoundReport> check_robust(const RegisterLayout& layout, double eps, double eps_prime,
                                                        std::span<const Unitary> pool, std::uint64_t seed) {
  detail::require_nogo_regime(layout);
  detail::require_eps(eps);
  detail::require_eps_prime_below_half(eps_prime);
  const double base = layout.clean_ratio() + 2 * eps;
  const bool nogo = base <= 1 - 2 * eps_prime;

  BoundReport ra;
  ra.theorem = TheoremId::PROP_ERR_A;
  ra.config.layout = layout;
  ra.config.set("eps", eps).set("eps_prime", eps_prime).set("nogo_condition", nogo ? 1.0 : 0.0);
  ra.seed = seed;
  ra.trials = pool.size();
  ra.bound = base;
  BoundReport rb = ra;
  rb.theorem = TheoremId::PROP_ERR_B;
  rb.bound = base / (1 - 2 * eps_prime);

  const auto all = detail::ensemble(pool, structured_unitaries(layout));
  ra.config.set("structured", static_cast<double>(all.size() - pool.size()));
  rb.config = ra.config;
  const DensityMatrix rho = dqc_input(layout);
  const DensityMatrix zero_d = basis_state(layout.d, 0);
  auto& input = ra.check("d(rho, rho~) <= eps", eps);
  auto& lmax = ra.check("lambda_max of discard output <= 2^(a-d) + 2 eps", base);
  std::optional<std::size_t> nogo_idx;
  if (nogo) {
    ra.check("min distance from discard output to a pure state > eps'", eps_prime, SubCheck::Kind::Lower, 0.0);
    nogo_idx = ra.checks.size() - 1;
  }
  auto& chain = rb.check("sum_j p_j S_j(0,0) <= 2^(a-d) + 2 eps", base);
  auto& zero_target = rb.check("P(eps'-close to |0>) <= bound", rb.bound);
  ra.observed = rb.observed = -1.0;
  double min_pure_dist = 1.0;
  for (std::size_t t = 0; t < all.size(); ++t) {
    const Unitary& u = all[t].u;
    // structured circuits see the two ends of the direction cycle
    const std::size_t dir = t < pool.size() ? t : (t - pool.size()) % 2 == 0 ? 0 : 1;
    const auto pert = perturb_toward(rho, detail::perturbation_direction(layout, dir, derive_seed(seed, t)), eps);
    detail::raise(input, pert.distance);

    const DensityMatrix out = discarding_channel(u, layout, pert.state);
    const double top = hermitian_eigenvalues(out.matrix()).back();
    detail::raise(lmax, top);
    min_pure_dist = std::min(min_pure_dist, std::clamp(1.0 - top, 0.0, 1.0));
    ra.per_trial.push_back(out(0, 0).real());
    ra.observed = std::max(ra.observed, out(0, 0).real());

    const auto outs = measuring_channel(u, layout, pert.state);
    detail::raise(chain, weighted_entry00(outs));
    detail::raise(zero_target, pure_outcome_probability(outs, zero_d, eps_prime));
    const double q = close_to_pure_probability(outs, eps_prime);
    rb.per_trial.push_back(q);
    rb.observed = std::max(rb.observed, q);
  }
  if (nogo_idx) ra.checks[*nogo_idx].observed = min_pure_dist;
  for (auto* rep : {&ra, &rb}) {
    detail::finish_unused(*rep);
    rep->notes.push_back(nogo ? "eps + eps' <= 1/2 - 2^(a-d-1): no circuit reaches an eps'-pure output"
                              : "eps + eps' above the no-go threshold: only the probability bound applies");
    detail::note_argmax(*rep, all);
  }
  return {std::move(ra), std::move(rb)};
}

inline std::pair<BoundReport, BoundReport> check_robust(const RegisterLayout& layout, double eps, double eps_prime,
                                                        std::size_t trials, std::uint64_t seed) {
  const auto pool = haar_pool(layout.n(), trials, seed);
  return check_robust(layout, eps, eps_prime, pool, seed);
}

/// Gibbs states of gamma-gapped Hamiltonians at 1.01 times the threshold
/// inverse temperature: max d(G_beta, ground) against eps'. Odd trials rotate
/// the diagonal Hamiltonian by a Haar unitary.
inline BoundReport check_gibbs_lemma(int d, double gamma, double eps_prime, std::size_t trials, std::uint64_t seed) {
  if (!(eps_prime > 0 && eps_prime < 1)) throw std::invalid_argument("eps' must lie in (0, 1)");
  if (!(gamma > 0)) throw std::invalid_argument("gamma must be positive");
  BoundReport r;
  r.theorem = TheoremId::LEM_GIBBS;
  r.config.set("d", d).set("gamma", gamma).set("eps_prime", eps_prime).set("beta_factor", 1.01);
  r.seed = seed;
  r.trials = trials;
  r.bound = eps_prime;
  auto& closed = r.check("d(G, ground) == 1 - 1/Z", 0.0, SubCheck::Kind::Upper, 1e-10);
  auto& zbound = r.check("Z - 1 - (2^d - 1) exp(-beta gamma) <= 0", 0.0);
  r.observed = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    Hamiltonian h = random_gapped_diagonal(d, gamma, derive_seed(seed, 2 * t));
    if (t % 2 == 1) {
      const Unitary v = haar_random(d, derive_seed(seed, 2 * t + 1));
      ComplexMatrix m = mul_adjoint(v.matrix() * h.matrix(), v.matrix());
      detail::hermitize(m);
      h = Hamiltonian(std::move(m));
    }
    const auto gap = spectral_gap(h);
    const double g = std::isfinite(gap.gap) ? gap.gap : gamma;
    const double beta = 1.01 * beta_threshold(d, g, eps_prime);
    const DensityMatrix gs = gibbs_state(h, beta);
    const double dist = trace_distance(gs, pure_state(gap.ground_state));
    const double z = partition_function(h, beta);
    detail::raise(closed, std::abs(dist - (1 - 1 / z)));
    detail::raise(zbound, z - 1 - static_cast<double>(h.dim() - 1) * std::exp(-beta * g));
    r.per_trial.push_back(dist);
    r.observed = std::max(r.observed, dist);
  }
  detail::finish_unused(r);
  return r;
}

/// Probability that measuring C leaves D within 1/4 of the ground state of h,
/// which is where G_beta(h) sits once beta passes the threshold.
inline BoundReport check_gibbs_nogo(const RegisterLayout& layout, const Hamiltonian& h, double beta,
                                    std::span<const Unitary> pool, std::uint64_t seed) {
  detail::require_nogo_regime(layout);
  if (h.qubits() != layout.d) throw std::invalid_argument("check_gibbs_nogo: Hamiltonian must act on the d kept qubits");
  const auto gap = spectral_gap(h);
  if (gap.degenerate) throw std::invalid_argument("check_gibbs_nogo: Hamiltonian has a degenerate ground state");
  const double gamma = gap.gap;
  const double threshold = std::isfinite(gamma) ? beta_threshold(layout.d, gamma, 0.25) : 0.0;

  BoundReport r;
  r.theorem = TheoremId::COR_GIBBS;
  r.config.layout = layout;
  r.config.set("beta", beta).set("gamma", std::isfinite(gamma) ? gamma : 0.0).set("beta_threshold", threshold);
  r.seed = seed;
  r.bound = std::ldexp(1.0, layout.a - layout.d + 1);
  if (r.bound >= 1) r.notes.push_back("bound 2^(a-d+1) >= 1 is vacuous");
  if (!(beta > threshold)) {
    r.precondition_met = false;
    r.notes.push_back("precondition unmet: beta does not exceed the threshold, nothing asserted");
    return r;
  }
  r.trials = pool.size();
  const DensityMatrix ground = pure_state(gap.ground_state);
  const DensityMatrix gs = gibbs_state(h, beta);
  const double gibbs_dist = trace_distance(gs, ground);
  r.check("d(G_beta, ground) < 1/4", 0.25, SubCheck::Kind::Upper, 0.0).observed = gibbs_dist;

  const auto all = detail::ensemble(pool, structured_unitaries(layout, gap.ground_state));
  r.config.set("structured", static_cast<double>(all.size() - pool.size()));
  const DensityMatrix rho = dqc_input(layout);
  auto& exact = r.check("P(outcome equals G_beta) <= bound", r.bound);
  auto& fid = r.check("<ground| discard output |ground> <= 2^(a-d)", layout.clean_ratio());
  r.observed = -1.0;
  for (const auto& [label, u] : all) {
    const auto outs = measuring_channel(u, layout, rho);
    const double p = pure_outcome_probability(outs, ground, 0.25);
    double p_exact = 0.0;
    for (const auto& o : outs) {
      if (!o.post_state) continue;
      // d(S, G) >= 1 - <g|S|g> - d(G, g)
      if (1 - overlap(*o.post_state, ground) - gibbs_dist > 1e-9) continue;
      if (trace_distance(*o.post_state, gs) <= 1e-9) p_exact += o.probability;
    }
    detail::raise(exact, p_exact);
    ComplexMatrix sum(layout.D(), layout.D());
    for (const auto& o : outs)
      if (o.post_state) sum += o.post_state->matrix() * o.probability;
    detail::hermitize(sum);
    sum *= 1.0 / sum.trace().real();
    detail::raise(fid, overlap(DensityMatrix(std::move(sum)), ground));
    r.per_trial.push_back(p);
    r.observed = std::max(r.observed, p);
  }
  detail::finish_unused(r);
  detail::note_argmax(r, all);
  return r;
}

inline BoundReport check_gibbs_nogo(const RegisterLayout& layout, const Hamiltonian& h, double beta, std::size_t trials,
                                    std::uint64_t seed) {
  const auto pool = haar_pool(layout.n(), trials, seed);
  return check_gibbs_nogo(layout, h, beta, pool, seed);
}

/// Purity of the system after every prefix of a repeated-interaction plan.
/// Observed is the number of prefixes with k a < n whose output is pure
/// (purity >= 1 - 1e-9); the bound is zero. With `staircase` set, also
/// asserts purity exactly from step ceil(n/a) on and entry (0,0) = 2^(ka-n).
inline BoundReport check_cdl(const RepeatedInteractionPlan& plan, std::uint64_t seed, bool staircase = false) {
  plan.validate();
  const int a = plan.ancillas, n = plan.system;
  const int k = static_cast<int>(plan.steps.size());
  BoundReport r;
  r.theorem = TheoremId::COR_CDL;
  r.config.set("a", a).set("n", n).set("k", k).set("staircase", staircase ? 1.0 : 0.0);
  r.seed = seed;
  r.trials = 1;
  r.bound = 0.0;
  r.observed = 0.0;
  auto& seq = r.check("unfolded vs sequential max entry difference", 0.0, SubCheck::Kind::Upper, 1e-10);
  auto& clean = r.check("max_k entry00 * 2^(n-ka) over ka < n", 1.0);
  const int pure_step = (n + a - 1) / a;
  for (int s = 1; s <= k; ++s) {
    RepeatedInteractionPlan prefix = plan;
    prefix.steps.resize(static_cast<std::size_t>(s));
    const auto [circ, layout] = unfold(prefix);
    const DensityMatrix out = discarding_channel(assemble(circ), layout, dqc_input(layout));
    const DensityMatrix direct = simulate_sequential(prefix, maximally_mixed(n));
    detail::raise(seq, max_abs_diff(out.matrix(), direct.matrix()));
    const double purity = out.purity();
    const double entry = out(0, 0).real();
    r.per_trial.push_back(entry);
    if (s * a < n) {
      if (purity >= 1 - 1e-9) r.observed += 1;
      detail::raise(clean, entry * std::ldexp(1.0, n - s * a));
    }
    if (staircase) {
      const std::string tag = "step " + std::to_string(s);
      r.check(tag + " entry00 == 2^(min(ka,n)-n)", std::ldexp(1.0, std::min(s * a, n) - n), SubCheck::Kind::Equal, 1e-10)
          .observed = entry;
      if (s < pure_step)
        r.check(tag + " purity < 1 - 1e-3", 1 - 1e-3, SubCheck::Kind::Upper, 0.0).observed = purity;
      else
        r.check(tag + " purity >= 1 - 1e-10", 1 - 1e-10, SubCheck::Kind::Lower, 0.0).observed = purity;
    }
  }
  detail::finish_unused(r);
  if (staircase && pure_step > k)
    r.notes.push_back("plan stops before step " + std::to_string(pure_step) + ", the first step that can be pure");
  return r;
}

/// Block staircase on (a, n, k) plus `trials` random plans whose k steps are
/// Haar unitaries on a + n wires. Reports are merged: observed counts early
/// pure outputs over all plans.
inline BoundReport check_cdl(int a, int n, int k, std::size_t trials, std::uint64_t seed) {
  BoundReport r = check_cdl(block_staircase_plan(a, n, k), seed, true);
  r.trials = 1 + trials;
  double worst_purity = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    RepeatedInteractionPlan plan;
    plan.ancillas = a;
    plan.system = n;
    for (int s = 0; s < k; ++s) {
      std::vector<int> wires(static_cast<std::size_t>(a + n));
      for (int w = 0; w < a + n; ++w) wires[static_cast<std::size_t>(w)] = w;
      const Unitary u = haar_random(a + n, derive_seed(seed, t * static_cast<std::uint64_t>(k) + s));
      plan.steps.push_back(Circuit(a + n, {gate_unitary(wires, u.matrix())}));
    }
    const BoundReport sub = check_cdl(plan, seed, false);
    r.observed += sub.observed;
    for (const auto& c : sub.checks) {
      auto& mine = r.check(c.name, c.bound, c.kind, c.tol);
      detail::raise(mine, c.observed);
    }
    // purity of the last prefix that is still too short to be pure
    const int last_short = std::min(k, (n - 1) / a);
    if (last_short >= 1) {
      RepeatedInteractionPlan prefix = plan;
      prefix.steps.resize(static_cast<std::size_t>(last_short));
      worst_purity = std::max(worst_purity, simulate_sequential(prefix, maximally_mixed(n)).purity());
    }
  }
  if (trials > 0) {
    r.check("random plans: max purity while ka < n", 1 - 1e-6, SubCheck::Kind::Upper, 0.0).observed = worst_purity;
  }
  return r;
}

/// Entropy chain on the DQC input: H(rho) = b, invariance under U, the
/// subadditivity step, and the consequence H(tr_C U rho U^dagger) >= b - c.
/// Observed is max (b - c) - H(tr_C U rho U^dagger).
inline BoundReport check_entropic(const RegisterLayout& layout, std::span<const Unitary> pool, std::uint64_t seed) {
  BoundReport r;
  r.theorem = TheoremId::ENTROPIC;
  r.config.layout = layout;
  r.seed = seed;
  r.trials = pool.size();
  r.bound = 0.0;
  const DensityMatrix rho = dqc_input(layout);
  const double hb = von_neumann_entropy(rho);
  r.check("H(rho) == b", layout.b, SubCheck::Kind::Equal, 1e-9).observed = hb;
  auto& inv = r.check("H(U rho U^dagger) == b", layout.b, SubCheck::Kind::Equal, 1e-8);
  auto& al = r.check("H - H(tr_C) - H(tr_D) <= 0", 0.0, SubCheck::Kind::Upper, 1e-8);
  auto& dmax = r.check("H(tr_D) <= c", layout.c, SubCheck::Kind::Upper, 1e-8);
  const auto all = detail::ensemble(pool, structured_unitaries(layout));
  r.config.set("structured", static_cast<double>(all.size() - pool.size()));
  r.observed = -std::numeric_limits<double>::infinity();
  for (const auto& [label, u] : all) {
    const DensityMatrix full = apply_unitary(rho, u);
    const double h = von_neumann_entropy(full);
    const double hc = von_neumann_entropy(partial_trace(full, layout.c));
    const double hd = von_neumann_entropy(partial_trace_bottom(full, layout.d));
    detail::track(inv, h);
    detail::raise(al, h - hc - hd);
    detail::raise(dmax, hd);
    const double gap = (layout.b - layout.c) - hc;
    r.per_trial.push_back(gap);
    r.observed = std::max(r.observed, gap);
  }
  detail::finish_unused(r);
  return r;
}

inline BoundReport check_entropic(const RegisterLayout& layout, std::size_t trials, std::uint64_t seed) {
  const auto pool = haar_pool(layout.n(), trials, seed);
  return check_entropic(layout, pool, seed);
}

/// H(sigma) <= H(tr_C sigma) + H(tr_D sigma) and |H(tr_C) - H(tr_D)| <= H(sigma)
/// on random states cycling through random rank, rank one and full rank.
inline BoundReport check_araki_lieb(int n, int c, std::size_t trials, std::uint64_t seed) {
  if (c < 0 || c > n) throw std::invalid_argument("check_araki_lieb: c must lie in [0, n]");
  BoundReport r;
  r.theorem = TheoremId::ARAKI_LIEB;
  r.config.set("n", n).set("c", c);
  r.seed = seed;
  r.trials = trials;
  r.bound = 0.0;
  auto& tri = r.check("|H(tr_C) - H(tr_D)| - H <= 0", 0.0, SubCheck::Kind::Upper, 1e-8);
  auto& pure = r.check("pure states: |H(tr_C) - H(tr_D)|", 0.0, SubCheck::Kind::Upper, 1e-8);
  r.observed = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t s = derive_seed(seed, t);
    const DensityMatrix sigma = t % 3 == 0   ? random_mixed_state(n, s)
                                : t % 3 == 1 ? random_density_matrix(n, s, 1)
                                             : random_density_matrix(n, s);
    const double h = von_neumann_entropy(sigma);
    const double hc = von_neumann_entropy(partial_trace(sigma, c));
    const double hd = von_neumann_entropy(partial_trace_bottom(sigma, n - c));
    detail::raise(tri, std::abs(hc - hd) - h);
    if (t % 3 == 1) detail::raise(pure, std::abs(hc - hd));
    r.per_trial.push_back(h - hc - hd);
    r.observed = std::max(r.observed, h - hc - hd);
  }
  if (trials == 0) r.observed = 0.0;
  detail::finish_unused(r);
  return r;
}

enum class SearchObjective { ENTRY00, PURE_PROB };

inline std::string_view to_string(SearchObjective o) { return o == SearchObjective::ENTRY00 ? "ENTRY00" : "PURE_PROB"; }

inline SearchObjective search_objective_from_string(std::string_view s) {
  if (s == "ENTRY00" || s == "entry00") return SearchObjective::ENTRY00;
  if (s == "PURE_PROB" || s == "pure_prob") return SearchObjective::PURE_PROB;
  throw std::invalid_argument("unknown search objective '" + std::string(s) + "'");
}

struct SearchResult {
  SearchObjective objective = SearchObjective::ENTRY00;
  RegisterLayout layout;
  double eps_prime = 0.0;
  double best_observed = 0.0;
  std::optional<Unitary> best_unitary;
  std::uint64_t iterations = 0;
  std::uint64_t restarts = 0;
  std::uint64_t seed = 0;
  double bound = 0.0;
  double entry00_at_best = 0.0;    // entry-level value of the best unitary
  double pure_prob_at_best = 0.0;  // exact-pure (eps') probability of the best unitary
  std::vector<double> restart_values;

  bool violated() const { return best_observed > bound + kViolationTol; }
};

namespace detail {

inline double search_value(SearchObjective obj, const Unitary& u, const RegisterLayout& l, const DensityMatrix& rho,
                           double eps_prime) {
  if (obj == SearchObjective::ENTRY00) return entry00_direct(u, l);
  return close_to_pure_probability(measuring_channel(u, l, rho), eps_prime);
}

// Two-level rotation [[c, -e^{i phi} s], [e^{-i phi} s, c]] on rows (left) or columns (right) p, q.
inline void givens(ComplexMatrix& m, bool left, std::size_t p, std::size_t q, double theta, double phi) {
  const double c = std::cos(theta), s = std::sin(theta);
  const Complex e = std::polar(1.0, phi);
  const Complex g01 = -e * s, g10 = std::conj(e) * s;
  const std::size_t len = m.rows();
  for (std::size_t i = 0; i < len; ++i) {
    Complex& x = left ? m(p, i) : m(i, p);
    Complex& y = left ? m(q, i) : m(i, q);
    const Complex xp = left ? c * x + g01 * y : c * x + g10 * y;
    const Complex yp = left ? g10 * x + c * y : g01 * x + c * y;
    x = xp;
    y = yp;
  }
}

}  // namespace detail

/// Random restarts plus accept-if-not-worse ascent over two-level rotations.
/// Restart 0 is SWAP forwarding, restart 1 (for PURE_PROB) the pure-packing
/// permutation, the rest Haar.
inline SearchResult saturation_search(const RegisterLayout& layout, SearchObjective objective, std::size_t restarts,
                                      std::size_t iters, std::uint64_t seed, double eps_prime = 0.0) {
  detail::require_eps_prime_below_half(eps_prime);
  if (restarts < 1) throw std::invalid_argument("saturation_search needs at least one restart");
  SearchResult res;
  res.objective = objective;
  res.layout = layout;
  res.eps_prime = eps_prime;
  res.seed = seed;
  res.restarts = restarts;
  res.bound = eps_prime == 0.0 ? layout.clean_ratio() : layout.clean_ratio() / (1 - 2 * eps_prime);
  const DensityMatrix rho = dqc_input(layout);
  const std::size_t N = layout.N();
  res.best_observed = -1.0;
  for (std::size_t r = 0; r < restarts; ++r) {
    Unitary start = r == 0                                             ? forwarding_unitary(layout)
                    : r == 1 && objective == SearchObjective::PURE_PROB ? pure_packing_unitary(layout)
                                                                        : haar_random(layout.n(), derive_seed(seed, r));
    ComplexMatrix cur = start.matrix();
    double val = detail::search_value(objective, start, layout, rho, eps_prime);
    if (N > 1) {
      std::mt19937_64 rng(derive_seed(seed ^ 0x5eed, r));
      std::uniform_int_distribution<std::size_t> pick(0, N - 1);
      std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
      std::normal_distribution<double> normal(0.0, 1.0);
      std::bernoulli_distribution side(0.5);
      double step = 0.5;
      for (std::size_t it = 0; it < iters; ++it) {
        const std::size_t p = pick(rng);
        std::size_t q = pick(rng);
        while (q == p) q = pick(rng);
        const bool left = side(rng);
        const double theta = step * normal(rng), phi = angle(rng);
        ComplexMatrix trial = cur;
        detail::givens(trial, left, p, q, theta, phi);
        const double v = detail::search_value(objective, Unitary::assume(trial), layout, rho, eps_prime);
        if (v >= val) {
          cur = std::move(trial);
          val = v;
          step = std::min(1.0, step * 1.05);
        } else {
          step = std::max(1e-3, step * 0.98);
        }
      }
    }
    res.iterations += iters;
    res.restart_values.push_back(val);
    if (val > res.best_observed) {
      res.best_observed = val;
      res.best_unitary = Unitary(std::move(cur));
    }
  }
  const Unitary& best = *res.best_unitary;
  res.entry00_at_best = entry00_direct(best, layout);
  res.pure_prob_at_best = close_to_pure_probability(measuring_channel(best, layout, rho), eps_prime);
  return res;
}

/// Default configuration matrix covering every bound on layouts up to n = 8.
struct SuiteReport {
  std::uint64_t seed = 0;
  std::vector<BoundReport> reports;
  std::vector<SearchResult> searches;

  std::size_t violations() const {
    std::size_t v = 0;
    for (const auto& r : reports) v += r.any_violation() ? 1 : 0;
    for (const auto& s : searches) v += s.violated() ? 1 : 0;
    return v;
  }
};

inline SuiteReport run_default_suite(std::uint64_t seed) {
  SuiteReport suite;
  suite.seed = seed;
  std::uint64_t stream = 0;
  auto next = [&] { return derive_seed(seed, stream++); };
  auto& out = suite.reports;

  for (const RegisterLayout& l : {RegisterLayout(1, 2, 1, 2), RegisterLayout(1, 3, 1, 3), RegisterLayout(2, 2, 1, 3),
                                  RegisterLayout(2, 1, 1, 2), RegisterLayout(1, 5, 2, 4), RegisterLayout(2, 6, 3, 5)})
    out.push_back(check_discard_nogo(l, l.n() >= 8 ? 20 : 200, next()));
  for (const RegisterLayout& l : {RegisterLayout(1, 2, 1, 2), RegisterLayout(1, 3, 2, 2), RegisterLayout(2, 3, 1, 4),
                                  RegisterLayout(2, 1, 1, 2), RegisterLayout(1, 7, 4, 4)})
    out.push_back(check_measure_bound(l, l.n() >= 8 ? 20 : 200, next(), 0.0));
  out.push_back(check_measure_bound(RegisterLayout(1, 2, 1, 2), 200, next(), 0.1));
  for (double eps : {0.05, 0.1, 0.25}) out.push_back(check_lemma00(4, 2, eps, 200, next()));
  out.push_back(check_lemma00(5, 0, 0.1, 100, next()));
  for (auto [eps, epsp] : {std::pair{0.125, 0.125}, {0.0, 0.1}, {0.05, 0.1}, {0.1, 0.2}}) {
    auto [ra, rb] = check_robust(RegisterLayout(1, 2, 1, 2), eps, epsp, 200, next());
    out.push_back(std::move(ra));
    out.push_back(std::move(rb));
  }
  {
    auto [ra, rb] = check_robust(RegisterLayout(1, 3, 1, 3), 0.05, 0.05, 100, next());
    out.push_back(std::move(ra));
    out.push_back(std::move(rb));
  }
  for (int d = 1; d <= 4; ++d) out.push_back(check_gibbs_lemma(d, 1.0, 0.25, 25, next()));
  {
    const Hamiltonian h2 = Hamiltonian::diagonal({0.0, 1.0, 1.0, 2.0});
    const double beta = 2 * std::log(2.0) + std::log(3.0) + 0.1;
    out.push_back(check_gibbs_nogo(RegisterLayout(1, 2, 1, 2), h2, beta, 100, next()));
    const Hamiltonian h4 = random_gapped_diagonal(4, 1.0, next());
    out.push_back(check_gibbs_nogo(RegisterLayout(1, 3, 0, 4), h4, 1.1 * beta_threshold(4, 1.0, 0.25), 100, next()));
    out.push_back(check_gibbs_nogo(RegisterLayout(1, 4, 1, 4), h4, 1.1 * beta_threshold(4, 1.0, 0.25), 50, next()));
  }
  for (int n = 2; n <= 4; ++n) out.push_back(check_cdl(staircase_plan(n, n), next(), true));
  out.push_back(check_cdl(1, 3, 2, 20, next()));
  out.push_back(check_cdl(2, 3, 2, 5, next()));
  for (const RegisterLayout& l : {RegisterLayout(1, 2, 1, 2), RegisterLayout(1, 3, 1, 3), RegisterLayout(2, 3, 2, 3),
                                  RegisterLayout(0, 4, 2, 2)})
    out.push_back(check_entropic(l, 100, next()));
  out.push_back(check_araki_lieb(4, 2, 200, next()));
  out.push_back(check_araki_lieb(6, 3, 50, next()));

  const RegisterLayout l1212(1, 2, 1, 2);
  suite.searches.push_back(saturation_search(l1212, SearchObjective::ENTRY00, 4, 400, next()));
  suite.searches.push_back(saturation_search(l1212, SearchObjective::PURE_PROB, 4, 200, next()));
  suite.searches.push_back(saturation_search(RegisterLayout(2, 1, 1, 2), SearchObjective::ENTRY00, 2, 100, next()));
  return suite;
}

}  // namespace cleanq
