#include <cleanq/serialize.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace cleanq;

namespace {

// Values that need all 17 significant digits to round-trip.
DensityMatrix awkward_state() { return apply_unitary(random_mixed_state(2, 5), haar_random(2, 6)); }

}  // namespace

TEST(state_json, round_trips_bit_exactly) {
  const auto s = awkward_state();
  const Json j = to_json(s);
  EXPECT_EQ(j["n"], 2);
  EXPECT_EQ(j["entries"].size(), 16u);
  const auto back = state_from_json(Json::parse(j.dump()));
  EXPECT_EQ(back, s);
}

TEST(state_json, rejects_bad_documents) {
  EXPECT_THROW(state_from_json(Json::parse(R"({"n": 1, "entries": [[1,0],[0,0],[0,0]]})")), std::invalid_argument);
  EXPECT_THROW(state_from_json(Json::parse(R"({"entries": []})")), std::invalid_argument);
  // trace 2
  EXPECT_THROW(state_from_json(Json::parse(R"({"n": 1, "entries": [[1,0],[0,0],[0,0],[1,0]]})")),
               std::invalid_argument);
}

TEST(matrix_json, round_trip) {
  const auto m = haar_random(2, 9).matrix();
  EXPECT_EQ(matrix_from_json(Json::parse(matrix_to_json(m).dump())), m);
}

TEST(outcomes_json, round_trip_keeps_missing_states) {
  const RegisterLayout l(3, 0, 1, 2);
  const auto outs = measuring_channel(haar_random(3, 2), l, basis_state(3, 0));
  std::vector<MeasurementOutcome> with_gap = outs;
  with_gap.push_back({5, 0.0, std::nullopt});
  const auto back = outcomes_from_json(Json::parse(to_json(with_gap).dump()));
  ASSERT_EQ(back.size(), with_gap.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].index, with_gap[i].index);
    EXPECT_EQ(back[i].probability, with_gap[i].probability);
    EXPECT_EQ(back[i].post_state, with_gap[i].post_state);
  }
  EXPECT_FALSE(back.back().post_state.has_value());
}

TEST(circuit_json, round_trip_all_gate_kinds) {
  const Circuit c(3, {gate_x(0), gate_h(1), gate_s(2), gate_swap(0, 2), gate_cnot(1, 0),
                      gate_controlled(2, {0}, gates::z()), gate_unitary({1, 2}, haar_random(2, 3).matrix())});
  const auto back = circuit_from_json(Json::parse(to_json(c).dump()));
  EXPECT_EQ(back, c);
  EXPECT_EQ(assemble(back).matrix(), assemble(c).matrix());
}

TEST(circuit_json, width_defaults_and_overrides) {
  const auto j = Json::parse(R"([{"kind": "X", "wires": [2]}])");
  EXPECT_EQ(circuit_from_json(j).n, 3);
  EXPECT_EQ(circuit_from_json(j, 5).n, 5);
  EXPECT_THROW(circuit_from_json(j, 2), std::invalid_argument);
  EXPECT_THROW(circuit_from_json(Json::parse(R"({"kind": "X"})")), std::invalid_argument);
  EXPECT_THROW(circuit_from_json(Json::parse(R"([{"kind": "Q", "wires": [0]}])")), std::invalid_argument);
}

TEST(hamiltonian_json, round_trip_and_diagonal_form) {
  const Hamiltonian h(haar_random(2, 4).matrix() * ComplexMatrix::diagonal({0, 0.3, 1.1, 2}) *
                      dagger(haar_random(2, 4).matrix()));
  const auto back = hamiltonian_from_json(Json::parse(to_json(h).dump()));
  EXPECT_EQ(back.matrix(), h.matrix());

  const auto diag = hamiltonian_from_json(Json::parse(R"({"d": 1, "diagonal": [0, 1]})"));
  EXPECT_EQ(diag.matrix(), ComplexMatrix::diagonal({0, 1}));
  EXPECT_THROW(hamiltonian_from_json(Json::parse(R"({"d": 1, "diagonal": [0, 1, 2]})")), std::invalid_argument);
  EXPECT_THROW(hamiltonian_from_json(Json::parse(R"({"d": 1})")), std::invalid_argument);
  // not Hermitian
  EXPECT_THROW(hamiltonian_from_json(Json::parse(R"({"d": 1, "entries": [[0,0],[1,0],[0,0],[0,0]]})")),
               std::invalid_argument);
}

TEST(report_json, has_documented_fields) {
  const RegisterLayout l(1, 2, 1, 2);
  const auto r = check_discard_nogo(l, 20, 3);
  const Json j = to_json(r);
  for (const char* key : {"theorem", "config", "observed", "bound", "margin", "trials", "seed", "violated"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["theorem"], "THM_TR");
  EXPECT_EQ(j["config"]["a"], 1);
  EXPECT_EQ(j["config"]["d"], 2);
  EXPECT_EQ(j["bound"].get<double>(), 0.5);
  EXPECT_EQ(j["violated"], false);
  EXPECT_EQ(j["margin"].get<double>(), r.bound - r.observed);
  EXPECT_FALSE(j.contains("per_trial"));
}

TEST(report_json, search_result_embeds_a_loadable_circuit) {
  const auto s = saturation_search(RegisterLayout(1, 2, 1, 2), SearchObjective::ENTRY00, 2, 20, 1);
  const Json j = to_json(s);
  EXPECT_EQ(j["objective"], "ENTRY00");
  ASSERT_TRUE(j.contains("best_circuit"));
  const auto u = assemble(circuit_from_json(j["best_circuit"], 3));
  EXPECT_NEAR(entry00_direct(u, RegisterLayout(1, 2, 1, 2)), s.best_observed, 1e-12);
}

TEST(csv, field_quoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(csv_row({"x", "y,z"}), "x,\"y,z\"\r\n");
}

TEST(csv, complex_strings_round_trip) {
  for (const Complex z : {Complex(0.5, -0.25), Complex(-1e-300, 3e20), Complex(0, -0.0), Complex(1.0 / 3, 2.0 / 7),
                          Complex(-2.5e-12, 1e-12)}) {
    const auto s = complex_to_string(z);
    const auto back = complex_from_string(s);
    EXPECT_EQ(back.real(), z.real()) << s;
    EXPECT_EQ(back.imag(), z.imag()) << s;
  }
  EXPECT_EQ(complex_to_string({1, -2}), "1-2i");
  EXPECT_THROW(complex_from_string("1.5"), std::invalid_argument);
  EXPECT_THROW(complex_from_string("1x+2i"), std::invalid_argument);
}

TEST(csv, report_rows_one_per_trial) {
  const auto r = check_discard_nogo(RegisterLayout(1, 2, 1, 2), 5, 0);
  const auto text = to_csv({r});
  EXPECT_EQ(text.rfind("theorem,config,trial,observed,bound,violated\r\n", 0), 0u);
  std::size_t lines = 0;
  for (std::size_t p = 0; (p = text.find("\r\n", p)) != std::string::npos; p += 2) ++lines;
  EXPECT_EQ(lines, 1 + r.per_trial.size());
  EXPECT_NE(text.find("\"a=1,b=2,c=1,d=2"), std::string::npos);
}

TEST(csv, state_rows) {
  const auto text = state_to_csv(basis_state(1, 0));
  EXPECT_EQ(text, "row,col,value\r\n0,0,1+0i\r\n0,1,0+0i\r\n1,0,0+0i\r\n1,1,0+0i\r\n");
}

TEST(canonical_dump, is_stable_and_newline_terminated) {
  const Json j = to_json(check_lemma00(3, 1, 0.1, 5, 2));
  const auto a = canonical_dump(j), b = canonical_dump(Json::parse(a));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.back(), '\n');
}
