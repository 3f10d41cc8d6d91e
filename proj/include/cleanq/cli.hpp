#pragma once

// Command-line front end. cli_main parses, runs and writes the report; exit
// status is 0 when nothing is violated, 1 on a violation and 2 on a usage or
// input error.

#include <cleanq/serialize.hpp>
#include <cleanq/verify.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cleanq::cli {

enum class Command {
  CheckDiscard,
  CheckMeasure,
  CheckRobust,
  CheckLemma00,
  CheckGibbs,
  CheckCdl,
  CheckEntropic,
  Search,
  Staircase,
  HadamardTest,
  Suite,
};

inline constexpr std::pair<Command, const char*> kCommandNames[] = {
    {Command::CheckDiscard, "check-discard"}, {Command::CheckMeasure, "check-measure"},
    {Command::CheckRobust, "check-robust"},   {Command::CheckLemma00, "check-lemma00"},
    {Command::CheckGibbs, "check-gibbs"},     {Command::CheckCdl, "check-cdl"},
    {Command::CheckEntropic, "check-entropic"}, {Command::Search, "search"},
    {Command::Staircase, "staircase"},         {Command::HadamardTest, "hadamard-test"},
    {Command::Suite, "suite"},
};

inline std::string to_string(Command c) {
  for (const auto& [cmd, name] : kCommandNames)
    if (cmd == c) return name;
  return "?";
}

enum class OutputFormat { Json, Csv };

struct RunConfig {
  Command command = Command::Suite;
  int a = 1, b = 2, c = 1, d = 2;
  std::size_t trials = 200;
  std::uint64_t seed = 0;
  double eps = 0.05;
  double eps_prime = 0.0;
  std::optional<double> beta;  // check-gibbs: defaults to 1.01 times the threshold
  double gamma = 1.0;
  int k = 0;  // 0: enough steps to reach purity
  int n = 3;
  int f = 1;
  std::uint64_t shots = 10000;
  std::string unitary = "identity";  // identity, z, haar, or a circuit file
  std::string part = "real";
  std::string hamiltonian;  // JSON file; empty draws a random gapped diagonal one
  std::string objective = "entry00";
  std::size_t restarts = 4;
  std::size_t iters = 500;
  std::string out;  // empty: stdout
  OutputFormat format = OutputFormat::Json;
  int max_qubits = 12;

  RegisterLayout layout() const { return RegisterLayout(a, b, c, d); }
};

/// Bad flags or values; maps to exit status 2.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RunOutcome {
  int exit_code = 0;
  std::string document;  // JSON or CSV text
};

using EnvLookup = std::function<std::optional<std::string>(const char*)>;

inline std::optional<std::string> process_env(const char* name) {
  if (const char* v = std::getenv(name)) return std::string(v);
  return std::nullopt;
}

inline std::uint64_t parse_seed(const std::string& s) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(s, &used, 0);
  } catch (const std::exception&) {
    throw UsageError("seed '" + s + "' is not a non-negative integer");
  }
  if (used != s.size()) throw UsageError("seed '" + s + "' is not a non-negative integer");
  return v;
}

/// Result of parsing: a config to run, or a finished exit (help, parse error).
struct Parsed {
  std::optional<RunConfig> config;
  int exit_code = 0;
};

inline Parsed parse_command_line(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
                                 const EnvLookup& env = process_env) {
  CLI::App app{"Numerical checks of clean-qubit no-go bounds", "cleanq"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string seed_text, format_text = "json";

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed_text, "Top-level seed (falls back to CLEANQ_SEED, then 0)");
    sub->add_option("--trials", cfg.trials, "Haar samples or random states per configuration");
    sub->add_option("--out", cfg.out, "Output file (default stdout); a .log sidecar records timing");
    sub->add_option("--format", format_text, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--max-qubits", cfg.max_qubits, "Global qubit cap")->check(CLI::Range(1, 30));
  };
  auto layout = [&](CLI::App* sub) {
    sub->add_option("--a", cfg.a, "Clean input qubits");
    sub->add_option("--b", cfg.b, "Maximally mixed input qubits");
    sub->add_option("--c", cfg.c, "Measured or discarded output qubits");
    sub->add_option("--d", cfg.d, "Kept output qubits");
  };

  std::vector<std::pair<CLI::App*, Command>> subs;
  auto add = [&](Command cmd, const char* help) {
    CLI::App* sub = app.add_subcommand(to_string(cmd), help);
    common(sub);
    subs.emplace_back(sub, cmd);
    return sub;
  };

  auto* s = add(Command::CheckDiscard, "Discarding no-go: max entry (0,0) of tr_C U rho U^dagger");
  layout(s);
  s = add(Command::CheckMeasure, "Probability that measuring C leaves D pure");
  layout(s);
  s->add_option("--eps-prime", cfg.eps_prime, "Closeness tolerance on the post-measurement state");
  s = add(Command::CheckRobust, "Noise-robust discard and measurement bounds");
  layout(s);
  s->add_option("--eps", cfg.eps, "Input noise (trace distance)");
  s->add_option("--eps-prime", cfg.eps_prime, "Output closeness");
  s = add(Command::CheckLemma00, "|(tr_F (sigma - sigma'))(0,0)| <= 2 eps");
  s->add_option("--n", cfg.n, "Qubits");
  s->add_option("--f", cfg.f, "Traced-out qubits");
  s->add_option("--eps", cfg.eps, "Trace distance between the pair");
  s = add(Command::CheckGibbs, "Gibbs-state preparation bound and the Gibbs closeness lemma");
  layout(s);
  s->add_option("--hamiltonian", cfg.hamiltonian, "Hamiltonian JSON on the d kept qubits");
  s->add_option("--beta", cfg.beta, "Inverse temperature (default 1.01 x threshold)");
  s->add_option("--gamma", cfg.gamma, "Gap of the random Hamiltonian when no file is given");
  s = add(Command::CheckCdl, "Repeated-interaction lower bound on the number of steps");
  s->add_option("--a", cfg.a, "Ancillas per step");
  s->add_option("--n", cfg.n, "System qubits");
  s->add_option("--k", cfg.k, "Steps (default ceil(n/a))");
  s = add(Command::CheckEntropic, "Entropy chain and subadditivity");
  layout(s);
  s = add(Command::Search, "Saturation search over unitaries");
  layout(s);
  s->add_option("--objective", cfg.objective, "entry00 or pure_prob")
      ->check(CLI::IsMember({"entry00", "pure_prob", "ENTRY00", "PURE_PROB"}));
  s->add_option("--restarts", cfg.restarts, "Random restarts");
  s->add_option("--iters", cfg.iters, "Rotations tried per restart");
  s->add_option("--eps-prime", cfg.eps_prime, "Closeness tolerance for pure_prob");
  s = add(Command::Staircase, "SWAP staircase: purity and entry (0,0) per step");
  s->add_option("--n", cfg.n, "System qubits");
  s->add_option("--k", cfg.k, "Steps (default n)");
  s = add(Command::HadamardTest, "Monte-Carlo one-clean-qubit trace estimate");
  s->add_option("--u", cfg.unitary, "identity, z, haar, or a circuit JSON file");
  s->add_option("--n", cfg.n, "Qubits of the mixed register");
  s->add_option("--shots", cfg.shots, "Shots")->check(CLI::PositiveNumber);
  s->add_option("--part", cfg.part, "real or imag")->check(CLI::IsMember({"real", "imag"}));
  add(Command::Suite, "Default configuration matrix over every bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return {std::nullopt, code == 0 ? 0 : 2};
  }
  for (const auto& [sub, cmd] : subs)
    if (sub->parsed()) cfg.command = cmd;
  try {
    if (!seed_text.empty())
      cfg.seed = parse_seed(seed_text);
    else if (auto v = env("CLEANQ_SEED"); v && !v->empty())
      cfg.seed = parse_seed(*v);
    cfg.format = format_text == "csv" ? OutputFormat::Csv : OutputFormat::Json;
    const bool uses_layout = cfg.command == Command::CheckDiscard || cfg.command == Command::CheckMeasure ||
                             cfg.command == Command::CheckRobust || cfg.command == Command::CheckGibbs ||
                             cfg.command == Command::CheckEntropic || cfg.command == Command::Search;
    if (uses_layout) {
      if (cfg.a < 0 || cfg.b < 0 || cfg.c < 0 || cfg.d < 0) throw UsageError("register sizes must be non-negative");
      if (cfg.a + cfg.b != cfg.c + cfg.d)
        throw UsageError("inconsistent layout: a+b=" + std::to_string(cfg.a + cfg.b) +
                         " but c+d=" + std::to_string(cfg.c + cfg.d));
      if (cfg.a + cfg.b > cfg.max_qubits)
        throw UsageError("layout has " + std::to_string(cfg.a + cfg.b) + " qubits, cap is " +
                         std::to_string(cfg.max_qubits));
      if (cfg.a + cfg.b < 1) throw UsageError("layout needs at least one qubit");
    }
    if (cfg.n < 0 || cfg.k < 0) throw UsageError("--n and --k must be non-negative");
  } catch (const UsageError& e) {
    err << "cleanq: " << e.what() << "\n";
    return {std::nullopt, 2};
  }
  return {cfg, 0};
}

namespace detail {

inline Unitary named_unitary(const RunConfig& cfg) {
  const int n = cfg.n;
  if (n < 1) throw UsageError("--n must be at least 1");
  if (cfg.unitary == "identity") return Unitary::identity(std::size_t{1} << n);
  if (cfg.unitary == "z") return assemble(Circuit(n, {gate_unitary({0}, gates::z())}));
  if (cfg.unitary == "haar") return haar_random(n, cfg.seed);
  return assemble(circuit_from_json(read_json_file(cfg.unitary), n));
}

inline std::string render(const std::vector<BoundReport>& reports, OutputFormat fmt, bool single) {
  if (fmt == OutputFormat::Csv) return to_csv(reports);
  if (single && reports.size() == 1) return canonical_dump(to_json(reports.front()));
  Json arr = Json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return canonical_dump(arr);
}

inline int exit_for(const std::vector<BoundReport>& reports) {
  for (const auto& r : reports)
    if (r.any_violation()) return 1;
  return 0;
}

}  // namespace detail

/// Runs one parsed configuration. Throws std::invalid_argument / DimensionError on bad input.
inline RunOutcome run(const RunConfig& cfg) {
  set_max_qubits(cfg.max_qubits);
  RunOutcome res;
  std::vector<BoundReport> reports;
  bool single = true;
  switch (cfg.command) {
    case Command::CheckDiscard:
      reports.push_back(check_discard_nogo(cfg.layout(), cfg.trials, cfg.seed));
      break;
    case Command::CheckMeasure:
      reports.push_back(check_measure_bound(cfg.layout(), cfg.trials, cfg.seed, cfg.eps_prime));
      break;
    case Command::CheckRobust: {
      auto [ra, rb] = check_robust(cfg.layout(), cfg.eps, cfg.eps_prime, cfg.trials, cfg.seed);
      reports.push_back(std::move(ra));
      reports.push_back(std::move(rb));
      single = false;
      break;
    }
    case Command::CheckLemma00:
      reports.push_back(check_lemma00(cfg.n, cfg.f, cfg.eps, cfg.trials, cfg.seed));
      break;
    case Command::CheckGibbs: {
      const RegisterLayout l = cfg.layout();
      const Hamiltonian h = cfg.hamiltonian.empty() ? random_gapped_diagonal(l.d, cfg.gamma, derive_seed(cfg.seed, 1))
                                                    : hamiltonian_from_json(read_json_file(cfg.hamiltonian));
      const auto gap = spectral_gap(h);
      if (gap.degenerate) throw std::invalid_argument("Hamiltonian ground state is degenerate");
      const double gamma = std::isfinite(gap.gap) ? gap.gap : cfg.gamma;
      const double beta = cfg.beta ? *cfg.beta : 1.01 * beta_threshold(h.qubits(), gamma, 0.25);
      reports.push_back(check_gibbs_nogo(l, h, beta, cfg.trials, cfg.seed));
      reports.push_back(check_gibbs_lemma(l.d, gamma, 0.25, std::min<std::size_t>(cfg.trials, 100), derive_seed(cfg.seed, 2)));
      single = false;
      break;
    }
    case Command::CheckCdl: {
      if (cfg.a < 1 || cfg.n < 1) throw UsageError("check-cdl needs --a >= 1 and --n >= 1");
      const int k = cfg.k > 0 ? cfg.k : (cfg.n + cfg.a - 1) / cfg.a;
      reports.push_back(check_cdl(cfg.a, cfg.n, k, cfg.trials, cfg.seed));
      break;
    }
    case Command::CheckEntropic:
      reports.push_back(check_entropic(cfg.layout(), cfg.trials, cfg.seed));
      reports.push_back(check_araki_lieb(cfg.layout().n(), cfg.c, cfg.trials, derive_seed(cfg.seed, 1)));
      single = false;
      break;
    case Command::Staircase: {
      if (cfg.n < 1) throw UsageError("staircase needs --n >= 1");
      const int k = cfg.k > 0 ? cfg.k : cfg.n;
      if (k > cfg.n) throw UsageError("staircase has at most n steps");
      reports.push_back(check_cdl(staircase_plan(cfg.n, k), cfg.seed, true));
      break;
    }
    case Command::Search: {
      const auto s = saturation_search(cfg.layout(), search_objective_from_string(cfg.objective), cfg.restarts, cfg.iters,
                                       cfg.seed, cfg.eps_prime);
      if (cfg.format == OutputFormat::Csv) {
        res.document = csv_row({"objective", "config", "restart", "value", "bound"});
        const std::string cfg_s = to_string(s.layout);
        for (std::size_t r = 0; r < s.restart_values.size(); ++r)
          res.document += csv_row({std::string(to_string(s.objective)), cfg_s, std::to_string(r),
                                   format_double(s.restart_values[r]), format_double(s.bound)});
      } else {
        res.document = canonical_dump(to_json(s));
      }
      res.exit_code = s.violated() ? 1 : 0;
      return res;
    }
    case Command::HadamardTest: {
      const Unitary u = detail::named_unitary(cfg);
      const TracePart part = cfg.part == "imag" ? TracePart::Imaginary : TracePart::Real;
      const double est = hadamard_test(u, cfg.shots, cfg.seed, part);
      const Complex tr = u.matrix().trace() / static_cast<double>(u.dim());
      const double exact = part == TracePart::Real ? tr.real() : tr.imag();
      if (cfg.format == OutputFormat::Csv) {
        res.document = csv_row({"u", "n", "shots", "seed", "part", "estimate", "exact"}) +
                       csv_row({cfg.unitary, std::to_string(cfg.n), std::to_string(cfg.shots), std::to_string(cfg.seed),
                                cfg.part, format_double(est), format_double(exact)});
      } else {
        const Json j = {{"u", cfg.unitary}, {"n", cfg.n},         {"shots", cfg.shots},        {"seed", cfg.seed},
                        {"part", cfg.part}, {"estimate", est}, {"exact", exact}, {"error", est - exact}};
        res.document = canonical_dump(j);
      }
      return res;
    }
    case Command::Suite: {
      const SuiteReport suite = run_default_suite(cfg.seed);
      if (cfg.format == OutputFormat::Csv)
        res.document = to_csv(suite.reports);
      else
        res.document = canonical_dump(to_json(suite));
      res.exit_code = suite.violations() > 0 ? 1 : 0;
      return res;
    }
  }
  res.document = detail::render(reports, cfg.format, single);
  res.exit_code = detail::exit_for(reports);
  return res;
}

namespace detail {

inline std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

/// Full front end: parse, run, write the document to --out or `out`, and the
/// timing sidecar to <out>.log.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr,
                    const EnvLookup& env = process_env) {
  const Parsed parsed = parse_command_line(argc, argv, out, err, env);
  if (!parsed.config) return parsed.exit_code;
  const RunConfig& cfg = *parsed.config;
  const std::string started = detail::utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  RunOutcome res;
  try {
    res = run(cfg);
  } catch (const std::invalid_argument& e) {
    err << "cleanq: " << e.what() << "\n";
    return 2;
  } catch (const std::length_error& e) {
    err << "cleanq: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "cleanq: malformed input: " << e.what() << "\n";
    return 2;
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (cfg.out.empty()) {
    out << res.document;
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) {
      err << "cleanq: cannot write '" << cfg.out << "'\n";
      return 2;
    }
    f << res.document;
    std::ofstream log(cfg.out + ".log");
    log << "command " << to_string(cfg.command) << "\nseed " << cfg.seed << "\nstarted " << started
        << "\nelapsed_seconds " << elapsed << "\nexit " << res.exit_code << "\n";
  }
  if (res.exit_code == 1) err << "cleanq: bound violated, see report\n";
  return res.exit_code;
}

}  // namespace cleanq::cli
