#pragma once

// JSON and CSV forms of states, outcome lists, circuits, Hamiltonians and reports.
//
//   state        {"n": 2, "entries": [[re, im], ...]}           row-major, 4^n entries
//   outcomes     [{"j": 0, "p": 0.5, "state": <state>}, ...]   state omitted when p_j is zero
//   circuit      [{"kind": "SWAP", "wires": [0, 1]}, {"kind": "U", "wires": [2], "matrix": [[[re, im], ...], ...]}]
//   hamiltonian  {"d": 1, "entries": [[re, im], ...]}  or  {"d": 1, "diagonal": [0.0, 1.0]}
//
// Doubles are written in shortest round-trip form, so a dump/parse cycle is exact.

#include <cleanq/channels.hpp>
#include <cleanq/circuits.hpp>
#include <cleanq/registers.hpp>
#include <cleanq/thermo.hpp>
#include <cleanq/verify.hpp>

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cleanq {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json complex_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument("expected a complex number as [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Json flat_entries(const ComplexMatrix& m) {
  Json e = Json::array();
  for (const auto& z : m.data()) e.push_back(complex_json(z));
  return e;
}

inline ComplexMatrix square_from_flat(const Json& entries, std::size_t dim) {
  if (!entries.is_array() || entries.size() != dim * dim)
    throw std::invalid_argument("expected " + std::to_string(dim * dim) + " entries");
  std::vector<Complex> v;
  v.reserve(dim * dim);
  for (const auto& z : entries) v.push_back(complex_from(z));
  return ComplexMatrix(dim, dim, std::move(v));
}

inline int qubit_count(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_number_integer())
    throw std::invalid_argument(std::string("expected an object with integer field '") + key + "'");
  const int n = j[key].get<int>();
  if (n < 0 || n > max_qubits()) throw DimensionError("qubit count " + std::to_string(n) + " outside cap");
  return n;
}

}  // namespace detail

// ---- states and matrices

inline Json to_json(const DensityMatrix& s) { return {{"n", s.qubits()}, {"entries", detail::flat_entries(s.matrix())}}; }

inline DensityMatrix state_from_json(const Json& j) {
  const int n = detail::qubit_count(j, "n");
  if (!j.contains("entries")) throw std::invalid_argument("state needs 'entries'");
  return DensityMatrix(detail::square_from_flat(j["entries"], std::size_t{1} << n));
}

/// Rows of [re, im] pairs.
inline Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (const auto& z : m.row(r)) row.push_back(detail::complex_json(z));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty())
    throw std::invalid_argument("matrix must be a non-empty list of rows");
  const std::size_t rows = j.size(), cols = j[0].size();
  std::vector<Complex> v;
  v.reserve(rows * cols);
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != cols) throw std::invalid_argument("matrix rows have unequal length");
    for (const auto& z : row) v.push_back(detail::complex_from(z));
  }
  return ComplexMatrix(rows, cols, std::move(v));
}

// ---- outcomes

inline Json to_json(const std::vector<MeasurementOutcome>& outcomes) {
  Json out = Json::array();
  for (const auto& o : outcomes) {
    Json rec = {{"j", o.index}, {"p", o.probability}};
    if (o.post_state) rec["state"] = to_json(*o.post_state);
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<MeasurementOutcome> outcomes_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("outcome list must be an array");
  std::vector<MeasurementOutcome> out;
  for (const auto& rec : j) {
    if (!rec.is_object() || !rec.contains("j") || !rec.contains("p")) throw std::invalid_argument("outcome needs j and p");
    MeasurementOutcome o;
    o.index = rec["j"].get<std::size_t>();
    o.probability = rec["p"].get<double>();
    if (rec.contains("state")) o.post_state.emplace(state_from_json(rec["state"]));
    out.push_back(std::move(o));
  }
  return out;
}

// ---- circuits

inline Json to_json(const Gate& g) {
  Json rec = {{"kind", std::string(to_string(g.kind))}, {"wires", g.wires}};
  if (g.matrix) rec["matrix"] = matrix_to_json(*g.matrix);
  return rec;
}

inline Json to_json(const Circuit& c) {
  Json out = Json::array();
  for (const auto& g : c.gates) out.push_back(to_json(g));
  return out;
}

inline Gate gate_from_json(const Json& rec) {
  if (!rec.is_object() || !rec.contains("kind") || !rec.contains("wires"))
    throw std::invalid_argument("gate record needs 'kind' and 'wires'");
  Gate g;
  g.kind = gate_kind_from_string(rec["kind"].get<std::string>());
  g.wires = rec["wires"].get<std::vector<int>>();
  if (rec.contains("matrix")) g.matrix = matrix_from_json(rec["matrix"]);
  return g;
}

/// Width n defaults to one more than the largest wire used.
inline Circuit circuit_from_json(const Json& j, int n = 0) {
  if (!j.is_array()) throw std::invalid_argument("circuit file must be a JSON list of gate records");
  std::vector<Gate> gates;
  int width = 1;
  for (const auto& rec : j) {
    gates.push_back(gate_from_json(rec));
    for (int w : gates.back().wires) width = std::max(width, w + 1);
  }
  if (n > 0) {
    if (width > n) throw std::invalid_argument("circuit uses wire " + std::to_string(width - 1) + " beyond width " +
                                               std::to_string(n));
    width = n;
  }
  return Circuit(width, std::move(gates));
}

// ---- Hamiltonians

inline Json to_json(const Hamiltonian& h) { return {{"d", h.qubits()}, {"entries", detail::flat_entries(h.matrix())}}; }

inline Hamiltonian hamiltonian_from_json(const Json& j) {
  const int d = detail::qubit_count(j, "d");
  const std::size_t dim = std::size_t{1} << d;
  if (j.contains("diagonal")) {
    const auto diag = j["diagonal"].get<std::vector<double>>();
    if (diag.size() != dim) throw std::invalid_argument("diagonal needs " + std::to_string(dim) + " values");
    return Hamiltonian::diagonal(diag);
  }
  if (j.contains("entries")) return Hamiltonian(detail::square_from_flat(j["entries"], dim));
  throw std::invalid_argument("Hamiltonian needs 'entries' or 'diagonal'");
}

// ---- reports

inline Json to_json(const ReportConfig& c) {
  Json out = Json::object();
  if (c.layout) {
    out["a"] = c.layout->a;
    out["b"] = c.layout->b;
    out["c"] = c.layout->c;
    out["d"] = c.layout->d;
  }
  for (const auto& [k, v] : c.params) out[k] = v;
  return out;
}

inline Json to_json(const SubCheck& c) {
  return {{"name", c.name},         {"relation", std::string(to_string(c.kind))},
          {"observed", c.observed}, {"bound", c.bound},
          {"tol", c.tol},           {"violated", c.violated()}};
}

inline Json to_json(const BoundReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return {{"theorem", std::string(to_string(r.theorem))},
          {"config", to_json(r.config)},
          {"observed", r.observed},
          {"bound", r.bound},
          {"margin", r.margin()},
          {"trials", r.trials},
          {"seed", r.seed},
          {"violated", r.violated()},
          {"precondition_met", r.precondition_met},
          {"checks", std::move(checks)},
          {"notes", r.notes}};
}

inline Json to_json(const SearchResult& s) {
  Json best = Json::array();
  if (s.best_unitary) {
    std::vector<int> wires;
    for (int w = 0; w < s.layout.n(); ++w) wires.push_back(w);
    best = to_json(Circuit(s.layout.n(), {gate_unitary(wires, s.best_unitary->matrix())}));
  }
  return {{"objective", std::string(to_string(s.objective))},
          {"config",
           {{"a", s.layout.a},
            {"b", s.layout.b},
            {"c", s.layout.c},
            {"d", s.layout.d},
            {"eps_prime", s.eps_prime},
            {"restarts", s.restarts}}},
          {"best_observed", s.best_observed},
          {"bound", s.bound},
          {"margin", s.bound - s.best_observed},
          {"violated", s.violated()},
          {"iterations", s.iterations},
          {"seed", s.seed},
          {"entry00_at_best", s.entry00_at_best},
          {"pure_prob_at_best", s.pure_prob_at_best},
          {"exact_pure_ceiling", exact_pure_ceiling(s.layout)},
          {"restart_values", s.restart_values},
          {"best_circuit", std::move(best)}};
}

inline Json to_json(const SuiteReport& s) {
  Json reports = Json::array(), searches = Json::array();
  for (const auto& r : s.reports) reports.push_back(to_json(r));
  for (const auto& x : s.searches) searches.push_back(to_json(x));
  return {{"seed", s.seed}, {"violations", s.violations()}, {"reports", std::move(reports)}, {"searches", std::move(searches)}};
}

/// Two-space indented dump with a trailing newline; the canonical byte form.
inline std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

// ---- CSV

/// RFC 4180 field: quoted when it holds a comma, quote or line break.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string csv_row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_field(fields[i]);
  }
  return line + "\r\n";
}

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// "re+imi" / "re-imi".
inline std::string complex_to_string(const Complex& z) {
  const double im = z.imag();
  return format_double(z.real()) + (std::signbit(im) ? "-" : "+") + format_double(std::abs(im)) + "i";
}

inline Complex complex_from_string(const std::string& s) {
  if (s.size() < 4 || s.back() != 'i') throw std::invalid_argument("complex string must look like re+imi");
  // the sign of the imaginary part is the last +/- not following an exponent marker
  std::size_t split = std::string::npos;
  for (std::size_t i = s.size() - 2; i > 0; --i)
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  if (split == std::string::npos) throw std::invalid_argument("complex string has no imaginary part");
  std::size_t used = 0;
  const double re = std::stod(s.substr(0, split), &used);
  if (used != split) throw std::invalid_argument("bad real part in '" + s + "'");
  const std::string ims = s.substr(split + 1, s.size() - split - 2);
  const double im = std::stod(ims, &used);
  if (used != ims.size()) throw std::invalid_argument("bad imaginary part in '" + s + "'");
  return {re, s[split] == '-' ? -im : im};
}

inline std::string config_string(const ReportConfig& c) {
  std::string out = c.layout ? to_string(*c.layout) : "";
  for (const auto& [k, v] : c.params) out += (out.empty() ? "" : ",") + k + "=" + format_double(v);
  return out;
}

inline const std::vector<std::string>& report_csv_header() {
  static const std::vector<std::string> h{"theorem", "config", "trial", "observed", "bound", "violated"};
  return h;
}

/// One row per trial. Reports without per-trial values get one "max" row.
inline std::string report_csv_rows(const BoundReport& r) {
  std::string out;
  const std::string th(to_string(r.theorem)), cfg = config_string(r.config), bound = format_double(r.bound);
  if (r.per_trial.empty()) {
    out += csv_row({th, cfg, "max", format_double(r.observed), bound, r.violated() ? "true" : "false"});
    return out;
  }
  for (std::size_t t = 0; t < r.per_trial.size(); ++t) {
    const bool v = r.precondition_met && r.per_trial[t] > r.bound + kViolationTol;
    out += csv_row({th, cfg, std::to_string(t), format_double(r.per_trial[t]), bound, v ? "true" : "false"});
  }
  return out;
}

inline std::string to_csv(const std::vector<BoundReport>& reports) {
  std::string out = csv_row(report_csv_header());
  for (const auto& r : reports) out += report_csv_rows(r);
  return out;
}

/// row,col,value with value as "re+imi".
inline std::string state_to_csv(const DensityMatrix& s) {
  std::string out = csv_row({"row", "col", "value"});
  for (std::size_t r = 0; r < s.dim(); ++r)
    for (std::size_t c = 0; c < s.dim(); ++c)
      out += csv_row({std::to_string(r), std::to_string(c), complex_to_string(s(r, c))});
  return out;
}

// ---- files

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace cleanq
