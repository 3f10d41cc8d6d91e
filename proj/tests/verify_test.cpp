#include <cleanq/verify.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

using namespace cleanq;

namespace {

const RegisterLayout kL1212(1, 2, 1, 2);

// Max over basis-permutation circuits of the probability of a pure outcome,
// by counting: the B live inputs land on distinct outputs, and outcome block j
// is pure exactly when it receives one of them.
double permutation_pure_max(const RegisterLayout& l) {
  const std::size_t N = l.N(), B = l.B(), D = l.D();
  std::vector<std::size_t> chosen;
  std::vector<bool> used(N, false);
  double best = 0.0;
  std::function<void()> rec = [&] {
    if (chosen.size() == B) {
      std::vector<int> per_block(l.C(), 0);
      for (auto y : chosen) ++per_block[y / D];
      const auto singles = std::count(per_block.begin(), per_block.end(), 1);
      best = std::max(best, static_cast<double>(singles) / static_cast<double>(B));
      return;
    }
    for (std::size_t y = 0; y < N; ++y) {
      if (used[y]) continue;
      used[y] = true;
      chosen.push_back(y);
      rec();
      chosen.pop_back();
      used[y] = false;
    }
  };
  rec();
  return best;
}

}  // namespace

TEST(derive_seed, deterministic_and_distinct) {
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 4; ++s)
    for (std::uint64_t i = 0; i < 256; ++i) seen.insert(derive_seed(s, i));
  EXPECT_EQ(seen.size(), 4u * 256u);
}

TEST(bound_report, violation_flag_uses_uniform_tolerance) {
  BoundReport r;
  r.bound = 0.5;
  r.observed = 0.5 + 0.9e-9;
  EXPECT_FALSE(r.violated());
  r.observed = 0.5 + 1.1e-9;
  EXPECT_TRUE(r.violated());
  EXPECT_NEAR(r.margin(), -1.1e-9, 1e-15);
  r.precondition_met = false;
  EXPECT_FALSE(r.violated());
}

TEST(bound_report, sub_check_kinds) {
  SubCheck up{"u", 1.0 + 2e-9, 1.0, 1e-9, SubCheck::Kind::Upper};
  SubCheck lo{"l", 1.0 - 2e-9, 1.0, 1e-9, SubCheck::Kind::Lower};
  SubCheck eq{"e", 1.0 + 5e-10, 1.0, 1e-9, SubCheck::Kind::Equal};
  EXPECT_TRUE(up.violated());
  EXPECT_TRUE(lo.violated());
  EXPECT_FALSE(eq.violated());
  BoundReport r;
  r.check("x", 0.0).observed = 1.0;
  EXPECT_TRUE(r.any_violation());
  EXPECT_EQ(theorem_from_string("COR_CDL"), TheoremId::COR_CDL);
  EXPECT_THROW(theorem_from_string("THM_X"), std::invalid_argument);
}

TEST(check_discard_nogo, haar_ensemble_respects_bound) {
  const auto r = check_discard_nogo(kL1212, 1000, 11);
  EXPECT_LE(r.observed, 0.5 + 1e-12);
  EXPECT_FALSE(r.any_violation());
  EXPECT_EQ(r.trials, 1000u);
  EXPECT_EQ(r.bound, 0.5);
  EXPECT_EQ(r.checks.front().name, "entry00_direct == channel entry");
  EXPECT_LE(r.checks.front().observed, 1e-12);
}

TEST(check_discard_nogo, forwarding_attains_bound) {
  // d = a: every clean qubit moves into D
  const auto eq = check_discard_nogo(RegisterLayout(1, 1, 1, 1), 0, 1);
  EXPECT_NEAR(eq.observed, 1.0, 1e-15);
  EXPECT_NEAR(eq.margin(), 0.0, 1e-15);

  const std::vector<Unitary> swap{assemble(Circuit(3, {gate_swap(0, 1)}))};
  const auto r = check_discard_nogo(kL1212, std::span<const Unitary>(swap), 1);
  EXPECT_NEAR(r.per_trial.front(), 0.5, 1e-15);
}

TEST(check_discard_nogo, same_seed_same_report) {
  const auto r1 = check_discard_nogo(RegisterLayout(1, 3, 2, 2), 30, 5);
  const auto r2 = check_discard_nogo(RegisterLayout(1, 3, 2, 2), 30, 5);
  EXPECT_EQ(r1.per_trial, r2.per_trial);
  const auto r3 = check_discard_nogo(RegisterLayout(1, 3, 2, 2), 30, 6);
  EXPECT_NE(r1.per_trial, r3.per_trial);
}

TEST(check_measure_bound, examples) {
  const auto r = check_measure_bound(kL1212, 300, 2, 0.0);
  EXPECT_LE(r.observed, 0.5);
  EXPECT_FALSE(r.any_violation());
  EXPECT_EQ(r.bound, 0.5);

  const auto fwd = check_measure_bound(RegisterLayout(2, 1, 1, 2), 0, 2, 0.0);
  EXPECT_NEAR(fwd.observed, 1.0, 1e-12);

  EXPECT_NEAR(check_measure_bound(kL1212, 0, 2, 0.1).bound, 0.5 / 0.8, 1e-15);
  EXPECT_THROW(check_measure_bound(kL1212, 1, 2, 0.5), std::invalid_argument);
}

TEST(check_measure_bound, entry_chain_equals_direct_entry) {
  const auto r = check_measure_bound(RegisterLayout(2, 3, 1, 4), 40, 9, 0.0);
  for (const auto& c : r.checks) EXPECT_FALSE(c.violated()) << c.name << " " << c.observed;
}

TEST(exact_pure_ceiling, matches_permutation_count_oracle) {
  for (const RegisterLayout& l : {kL1212, RegisterLayout(1, 1, 0, 2), RegisterLayout(1, 2, 2, 1),
                                  RegisterLayout(0, 3, 1, 2), RegisterLayout(2, 1, 1, 2)}) {
    EXPECT_DOUBLE_EQ(exact_pure_ceiling(l), permutation_pure_max(l)) << to_string(l);
    const auto outs = measuring_channel(pure_packing_unitary(l), l, dqc_input(l));
    EXPECT_NEAR(close_to_pure_probability(outs, 0.0), exact_pure_ceiling(l), 1e-12) << to_string(l);
  }
  EXPECT_EQ(exact_pure_ceiling(kL1212), 0.25);
}

TEST(exact_pure_ceiling, never_exceeded_by_haar_samples) {
  for (const RegisterLayout& l : {kL1212, RegisterLayout(1, 3, 2, 2)}) {
    const auto r = check_measure_bound(l, 200, 12, 0.0);
    EXPECT_LE(r.observed, exact_pure_ceiling(l) + 1e-9);
  }
}

TEST(check_lemma00, examples) {
  EXPECT_EQ(check_lemma00(3, 1, 0.0, 10, 1).observed, 0.0);
  const auto r = check_lemma00(4, 2, 0.1, 1000, 3);
  EXPECT_LE(r.observed, 0.2);
  EXPECT_FALSE(r.any_violation());
  const auto f0 = check_lemma00(3, 0, 0.25, 200, 4);
  EXPECT_FALSE(f0.any_violation());
  EXPECT_THROW(check_lemma00(3, 4, 0.1, 1, 1), std::invalid_argument);
}

TEST(check_robust, examples) {
  const auto [a, b] = check_robust(kL1212, 0.125, 0.125, 100, 5);
  EXPECT_EQ(a.config.get("nogo_condition"), 1.0);
  EXPECT_NEAR(a.bound, 0.75, 1e-15);
  EXPECT_FALSE(a.any_violation());
  EXPECT_FALSE(b.any_violation());

  const auto [a0, b0] = check_robust(kL1212, 0.0, 0.1, 0, 5);
  EXPECT_NEAR(b0.bound, 0.5 / 0.8, 1e-15);
  const auto [a1, b1] = check_robust(kL1212, 0.05, 0.1, 0, 5);
  EXPECT_NEAR(b1.bound, 0.75, 1e-15);
  EXPECT_EQ(a1.config.get("nogo_condition"), 1.0);
  const auto [a2, b2] = check_robust(kL1212, 0.1, 0.2, 0, 5);
  EXPECT_EQ(a2.config.get("nogo_condition"), 0.0);

  EXPECT_THROW(check_robust(kL1212, 0.1, 0.5, 1, 1), std::invalid_argument);
  EXPECT_THROW(check_robust(RegisterLayout(2, 1, 1, 2), 0.1, 0.1, 1, 1), std::invalid_argument);
}

TEST(check_robust, zero_noise_reduces_to_measurement_bound) {
  const auto [a, b] = check_robust(kL1212, 0.0, 0.0, 0, 1);
  EXPECT_EQ(b.bound, check_measure_bound(kL1212, 0, 1, 0.0).bound);
  EXPECT_EQ(a.bound, check_discard_nogo(kL1212, 0, 1).bound);
}

TEST(check_gibbs_lemma, closed_form_and_threshold) {
  for (int d = 1; d <= 4; ++d) {
    const auto r = check_gibbs_lemma(d, 0.7, 0.1, 20, 3);
    EXPECT_LT(r.observed, 0.1);
    EXPECT_FALSE(r.any_violation());
  }
}

TEST(check_gibbs_nogo, threshold_and_bounds) {
  const auto h = Hamiltonian::diagonal({0.0, 1.0, 1.0, 2.0});
  const double beta = 2 * std::log(2.0) + std::log(3.0) + 0.1;
  const auto r = check_gibbs_nogo(kL1212, h, beta, 50, 1);
  EXPECT_TRUE(r.precondition_met);
  EXPECT_NEAR(*r.config.get("beta_threshold"), 2 * std::log(2.0) + std::log(3.0), 1e-12);
  EXPECT_EQ(r.bound, 1.0);
  EXPECT_FALSE(r.any_violation());
  EXPECT_NE(std::find(r.notes.begin(), r.notes.end(), "bound 2^(a-d+1) >= 1 is vacuous"), r.notes.end());

  const auto h4 = random_gapped_diagonal(4, 1.0, 2);
  const auto r4 = check_gibbs_nogo(RegisterLayout(1, 4, 1, 4), h4, 1.2 * beta_threshold(4, 1.0, 0.25), 10, 1);
  EXPECT_EQ(r4.bound, 0.25);
  EXPECT_FALSE(r4.any_violation());

  const auto cold = check_gibbs_nogo(kL1212, h, 1.0, 50, 1);
  EXPECT_FALSE(cold.precondition_met);
  EXPECT_FALSE(cold.any_violation());
  EXPECT_EQ(cold.trials, 0u);

  EXPECT_THROW(check_gibbs_nogo(kL1212, Hamiltonian::diagonal({0, 0, 1, 1}), 9.0, 1, 1), std::invalid_argument);
  EXPECT_THROW(check_gibbs_nogo(kL1212, Hamiltonian::diagonal({0, 1}), 9.0, 1, 1), std::invalid_argument);
}

TEST(check_cdl, staircase_purity_timing) {
  for (int n = 2; n <= 4; ++n) {
    const auto r = check_cdl(staircase_plan(n, n), 0, true);
    EXPECT_EQ(r.observed, 0.0);
    EXPECT_FALSE(r.any_violation());
    ASSERT_EQ(r.per_trial.size(), static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) EXPECT_NEAR(r.per_trial[static_cast<std::size_t>(k - 1)], std::ldexp(1.0, k - n), 1e-12);
  }
}

TEST(check_cdl, random_plans_stay_mixed) {
  const auto r = check_cdl(1, 3, 2, 10, 4);
  EXPECT_EQ(r.observed, 0.0);
  EXPECT_FALSE(r.any_violation());
  const auto blocks = check_cdl(2, 3, 2, 3, 4);
  EXPECT_FALSE(blocks.any_violation());
}

TEST(check_cdl, short_plan_is_noted) {
  // two ancillas on three system wires need two steps
  const auto r = check_cdl(block_staircase_plan(2, 3, 1), 0, true);
  EXPECT_EQ(r.observed, 0.0);
  EXPECT_EQ(r.notes.size(), 1u);
}

TEST(check_entropic, examples) {
  const auto r = check_entropic(kL1212, 50, 1);
  EXPECT_FALSE(r.any_violation());
  // U = I: output (1/4) I on D has entropy 2, gap b - c - 2 = -1
  const auto id = check_entropic(kL1212, 0, 1);
  EXPECT_NEAR(id.per_trial.front(), -1.0, 1e-12);
  const auto r13 = check_entropic(RegisterLayout(1, 3, 1, 3), 50, 2);
  EXPECT_LE(r13.observed, 1e-8);
}

TEST(check_araki_lieb, holds_on_random_states) {
  const auto r = check_araki_lieb(4, 2, 60, 1);
  EXPECT_LE(r.observed, 1e-9);
  EXPECT_FALSE(r.any_violation());
}

TEST(saturation_search, entry_objective_reaches_bound) {
  const auto s = saturation_search(kL1212, SearchObjective::ENTRY00, 3, 200, 1);
  EXPECT_GE(s.best_observed, 0.5 - 1e-6);
  EXPECT_FALSE(s.violated());
  ASSERT_TRUE(s.best_unitary.has_value());
  EXPECT_TRUE(is_unitary(s.best_unitary->matrix()));
  EXPECT_EQ(s.restart_values.size(), 3u);
}

TEST(saturation_search, haar_restarts_climb) {
  // restart 0 is forwarding; later restarts start from Haar and must ascend
  const auto s = saturation_search(kL1212, SearchObjective::ENTRY00, 3, 1500, 2);
  for (double v : s.restart_values) EXPECT_GT(v, 0.45);
}

TEST(saturation_search, pure_objective_and_forwarding_case) {
  const auto s = saturation_search(kL1212, SearchObjective::PURE_PROB, 3, 100, 1);
  EXPECT_LE(s.best_observed, s.bound + 1e-9);
  EXPECT_NEAR(s.best_observed, exact_pure_ceiling(kL1212), 1e-12);
  const RegisterLayout eq(2, 1, 1, 2);
  EXPECT_NEAR(saturation_search(eq, SearchObjective::ENTRY00, 1, 10, 1).best_observed, 1.0, 1e-12);
  EXPECT_NEAR(saturation_search(eq, SearchObjective::PURE_PROB, 1, 10, 1).best_observed, 1.0, 1e-12);
}

TEST(default_suite, covers_every_theorem_without_violation) {
  const auto suite = run_default_suite(0);
  for (TheoremId t : kAllTheorems)
    EXPECT_TRUE(std::any_of(suite.reports.begin(), suite.reports.end(), [&](const BoundReport& r) { return r.theorem == t; }))
        << to_string(t);
  EXPECT_EQ(suite.violations(), 0u);
}

TEST(staircase_forwarding, saturates_whenever_d_exceeds_a) {
  for (int n = 1; n <= 5; ++n)
    for (int a = 0; a <= n; ++a)
      for (int c = 0; c <= n; ++c) {
        const RegisterLayout l(a, n - a, c, n - c);
        const double stair = entry00_direct(assemble(staircase_forwarding(l)), l);
        EXPECT_NEAR(stair, entry00_direct(forwarding_unitary(l), l), 1e-12) << to_string(l);
        if (l.d > l.a) {
          EXPECT_NEAR(stair, std::ldexp(1.0, l.a - l.d), 1e-12) << to_string(l);
        }
      }
}
