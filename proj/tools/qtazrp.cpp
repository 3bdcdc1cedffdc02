// Command-line front end: exact q-TAZRP transition probabilities via the
// Bethe contour formula, cross-checked against a master-equation oracle and
// a Gillespie simulator.  JSON-lines on stdout, human summary on stderr.
//
// Exit codes: 0 ok, 1 usage, 2 non-convergence, 3 resource cap,
//             4 verification failure.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtazrp/bethe.hpp"
#include "qtazrp/montecarlo.hpp"
#include "qtazrp/oracle.hpp"
#include "qtazrp/parallel.hpp"
#include "qtazrp/rng.hpp"
#include "qtazrp/transition.hpp"

using nlohmann::json;
using namespace qtazrp;

namespace {

std::vector<std::string> g_command;  // argv echo embedded in every report
bool g_csv = false;
bool g_csv_header_done = false;

std::vector<int> parse_coords(const std::string& text) {
  std::vector<int> coords;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed state \"" + text + "\": \"" + item +
                                  "\" is not an integer");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size())
      throw std::invalid_argument("malformed state \"" + text + "\": trailing characters in \"" +
                                  item + "\"");
    coords.push_back(v);
  }
  if (coords.empty()) throw std::invalid_argument("malformed state \"" + text + "\": empty");
  return coords;
}

StateVector parse_state(const std::string& text) {
  return StateVector(parse_coords(text));  // throws StateOrderError when not descending
}

RateProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open rates file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return RateProfile::from_json_text(buf.str());
}

json base_report(const std::string& method) {
  json r;
  r["method"] = method;
  r["command"] = g_command;
  r["seed"] = 0;
  r["nodes"] = 0;
  r["radius"] = 0.0;
  r["converged"] = true;
  return r;
}

void emit(const json& r) {
  if (!g_csv) {
    std::cout << r.dump() << "\n";
    return;
  }
  static const std::vector<std::string> cols = {"method", "from",  "to",     "t",     "value",
                                                "error",  "converged", "nodes", "radius", "seed"};
  if (!g_csv_header_done) {
    for (std::size_t i = 0; i < cols.size(); ++i)
      std::cout << cols[i] << (i + 1 < cols.size() ? "," : "\n");
    g_csv_header_done = true;
  }
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const auto it = r.find(cols[i]);
    if (it == r.end()) {
      // leave empty
    } else if (it->is_array()) {
      std::string s;
      for (const auto& v : *it) s += (s.empty() ? "" : " ") + v.dump();
      std::cout << '"' << s << '"';
    } else if (it->is_string()) {
      std::cout << it->get<std::string>();
    } else {
      std::cout << it->dump();
    }
    std::cout << (i + 1 < cols.size() ? "," : "\n");
  }
}

struct ContourFlags {
  double radius = 0.0;
  double radius_scale = 1.0;
  int nodes = 64;
  int max_nodes = 1024;
  double tol = 1e-10;

  void attach(CLI::App* cmd) {
    cmd->add_option("--radius", radius, "fixed contour radius (default: auto)");
    cmd->add_option("--radius-scale", radius_scale, "multiplier on the automatic radius");
    cmd->add_option("--nodes", nodes, "initial nodes per contour (power of two)");
    cmd->add_option("--max-nodes", max_nodes, "node-doubling ceiling");
    cmd->add_option("--tol", tol, "relative convergence tolerance");
  }

  ContourOptions options() const {
    ContourOptions o;
    o.radius = radius;
    o.radius_scale = radius_scale;
    o.nodes = nodes;
    o.max_nodes = max_nodes;
    o.tol = tol;
    return o;
  }
};

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

int run_prob(const std::string& from, const std::string& to, double t, const std::string& rates,
             const ContourFlags& flags) {
  Timer timer;
  TransitionRequest req{parse_state(from), parse_state(to), t, load_profile(rates),
                        flags.options()};
  ProbabilityResult res = transition_probability(req);

  json r = base_report("bethe");
  r["from"] = req.Y.coords();
  r["to"] = req.X.coords();
  r["t"] = t;
  r["value"] = res.p;
  r["error"] = res.estimated_error;
  r["converged"] = res.converged;
  r["nodes"] = res.nodes_max;
  r["radius"] = res.radius;
  r["imag_leak"] = res.imag_leak;
  emit(r);
  std::cerr << "P_" << to_string(req.Y) << " -> " << to_string(req.X) << " at t=" << t << ": "
            << res.p << " (err ~" << res.estimated_error << ", nodes " << res.nodes_max << ", R "
            << res.radius << (res.converged ? ", converged" : ", NOT CONVERGED") << ") ["
            << timer.ms() << " ms]\n";
  return res.converged ? 0 : 2;
}

int run_step_prob(const std::string& to, double t, const std::string& rates,
                  const ContourFlags& flags, bool cross_check) {
  Timer timer;
  const StateVector X = parse_state(to);
  const RateProfile profile = load_profile(rates);
  ProbabilityResult res = step_init_prob(X, t, profile, flags.options());

  json r = base_report("bethe");
  r["from"] = std::vector<int>(static_cast<std::size_t>(X.n()), 0);
  r["to"] = X.coords();
  r["t"] = t;
  r["value"] = res.p;
  r["error"] = res.estimated_error;
  r["converged"] = res.converged;
  r["nodes"] = res.nodes_max;
  r["radius"] = res.radius;
  bool ok = res.converged;
  if (cross_check) {
    TransitionRequest req{StateVector(std::vector<int>(static_cast<std::size_t>(X.n()), 0)), X, t,
                          profile, flags.options()};
    ProbabilityResult thm = transition_probability(req);
    r["cross_check_delta"] = std::abs(res.p - thm.p);
    ok = ok && thm.converged;
  }
  emit(r);
  std::cerr << "step-initial P to " << to_string(X) << " at t=" << t << ": " << res.p;
  if (r.contains("cross_check_delta"))
    std::cerr << " (permutation-sum delta " << r["cross_check_delta"].get<double>() << ")";
  std::cerr << " [" << timer.ms() << " ms]\n";
  return ok ? 0 : 2;
}

int run_oracle(const std::string& from, const std::string& to, double t, const std::string& rates,
               double eps) {
  Timer timer;
  const StateVector Y = parse_state(from);
  const StateVector X = parse_state(to);
  const RateProfile profile = load_profile(rates);
  const double mass = oracle_prob(Y, X, t, profile, eps);

  json r = base_report("oracle");
  r["from"] = Y.coords();
  r["to"] = X.coords();
  r["t"] = t;
  r["value"] = mass;
  r["error"] = eps + 1e-12;
  emit(r);
  std::cerr << "oracle P = " << mass << " (bound " << eps + 1e-12 << ") [" << timer.ms()
            << " ms]\n";
  return 0;
}

int run_simulate(const std::string& from, double t, long trials, std::uint64_t seed,
                 const std::string& rates, const std::vector<std::string>& targets) {
  Timer timer;
  SimConfig config{parse_state(from), t, trials, seed, load_profile(rates)};
  std::vector<Estimate> estimates;
  if (targets.empty()) {
    estimates = estimate_all_states(config);
  } else {
    std::vector<StateVector> list;
    list.reserve(targets.size());
    for (const auto& s : targets) list.push_back(parse_state(s));
    estimates = estimate_prob(config, list);
  }
  for (const auto& e : estimates) {
    json r = base_report("mc");
    r["from"] = config.Y.coords();
    r["to"] = e.target.coords();
    r["t"] = t;
    r["value"] = e.p_hat;
    r["error"] = e.std_err;
    r["seed"] = seed;
    r["hits"] = e.hits;
    r["trials"] = e.trials;
    emit(r);
  }
  std::cerr << estimates.size() << " estimate(s) from " << trials << " trials, seed " << seed
            << " [" << timer.ms() << " ms]\n";
  return 0;
}

// ---- verification suites ----------------------------------------------------

ComplexPoint random_circle_point(int n, double q, double radius, SplitMix64& rng) {
  const QParams qp(q);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    ComplexPoint w(static_cast<std::size_t>(n));
    for (auto& v : w) {
      const double theta = rng.uniform(0.0, 6.283185307179586);
      v = radius * cplx(std::cos(theta), std::sin(theta));
    }
    double min_gap = 1e300;
    for (std::size_t i = 0; i < w.size(); ++i)
      for (std::size_t j = i + 1; j < w.size(); ++j)
        min_gap = std::min(min_gap, std::abs(w[i] - w[j]));
    if ((n == 1 || min_gap > 0.05 * radius) && well_separated(w, qp)) return w;
  }
  throw std::runtime_error("random_circle_point: rejection sampling failed");
}

RateProfile random_profile(SplitMix64& rng, int site_lo = -5, int site_hi = 10) {
  static const double qs[3] = {0.3, 0.5, 0.7};
  const double q = qs[rng.uniform_int(0, 2)];
  std::map<int, double> overrides;
  const int n_over = static_cast<int>(rng.uniform_int(0, 5));
  for (int i = 0; i < n_over; ++i)
    overrides[static_cast<int>(rng.uniform_int(site_lo, site_hi))] = rng.uniform(0.5, 2.0);
  return RateProfile(rng.uniform(0.5, 2.0), QParams(q), std::move(overrides));
}

StateVector random_ordered_state(int n, int lo, int hi, SplitMix64& rng) {
  std::vector<int> c(static_cast<std::size_t>(n));
  for (auto& v : c) v = static_cast<int>(rng.uniform_int(lo, hi));
  std::sort(c.begin(), c.end(), std::greater<int>());
  return StateVector(std::move(c));
}

StateVector random_reachable_target(const StateVector& Y, int max_step, SplitMix64& rng) {
  std::vector<int> c = Y.coords();
  for (auto& v : c) v += static_cast<int>(rng.uniform_int(0, max_step));
  std::sort(c.begin(), c.end(), std::greater<int>());
  return StateVector(std::move(c));
}

struct CheckOutcome {
  std::string name;
  int n = 0;
  int cases = 0;
  double worst = 0.0;
  double tol = 0.0;
  bool pass() const { return worst < tol; }
};

void report_check(const CheckOutcome& c, bool& all_ok) {
  json r;
  r["suite"] = "verify";
  r["check"] = c.name;
  r["n"] = c.n;
  r["cases"] = c.cases;
  r["max_residual"] = c.worst;
  r["tol"] = c.tol;
  r["pass"] = c.pass();
  std::cout << r.dump() << "\n";
  std::cerr << (c.pass() ? "[PASS] " : "[FAIL] ") << c.name << " n=" << c.n
            << " max_residual=" << c.worst << " tol=" << c.tol << "\n";
  all_ok = all_ok && c.pass();
}

bool verify_identities(int n_max, std::uint64_t seed, int cases) {
  bool ok = true;
  SplitMix64 rng(seed);
  for (int n = 1; n <= n_max; ++n) {
    CheckOutcome perm{"perm_sum_identity", n, cases, 0.0, 1e-10};
    CheckOutcome cfun{"c_function_identity", n, cases, 0.0, 1e-10};
    for (int c = 0; c < cases; ++c) {
      const double q = rng.uniform(0.2, 0.8);
      const ComplexPoint w = random_circle_point(n, q, rng.uniform(2.0, 4.0), rng);
      const QParams qp(q);
      perm.worst = std::max(perm.worst, std::abs(perm_sum_identity_residual(w, qp)));
      const double target = (1.0 - std::pow(q, n)) / (1.0 - q);
      cfun.worst = std::max(cfun.worst, std::abs(c_function(w, qp) - target));
    }
    report_check(perm, ok);
    report_check(cfun, ok);
  }
  return ok;
}

bool verify_residuals(int n_max, std::uint64_t seed, int cases) {
  bool ok = true;
  SplitMix64 rng(seed + 1);
  for (int n = 2; n <= std::min(n_max, 3); ++n) {
    const double tol = n == 2 ? 1e-7 : 1e-6;
    CheckOutcome free_check{"free_evolution_residual", n, cases, 0.0, tol};
    CheckOutcome bc_check{"boundary_residual", n, cases, 0.0, tol};
    for (int c = 0; c < cases; ++c) {
      const RateProfile profile = random_profile(rng);
      const StateVector Y = random_ordered_state(n, -2, 2, rng);
      const double t = rng.uniform(0.0, 1.2);

      std::vector<int> xc(static_cast<std::size_t>(n));
      for (auto& v : xc) v = static_cast<int>(rng.uniform_int(-3, 5));
      const ComplexResult fr =
          free_evolution_residual(StateVector::relaxed(xc), Y, t, profile, {});
      free_check.worst = std::max(free_check.worst, std::abs(fr.value) / fr.scale);

      const int k = static_cast<int>(rng.uniform_int(1, n - 1));
      const int x = static_cast<int>(rng.uniform_int(-1, 4));
      std::vector<int> ctx(static_cast<std::size_t>(n));
      for (auto& v : ctx) v = static_cast<int>(rng.uniform_int(-2, 5));
      const ComplexResult br =
          boundary_residual(k, x, StateVector::relaxed(ctx), Y, t, profile, {});
      bc_check.worst = std::max(bc_check.worst, std::abs(br.value) / br.scale);
    }
    report_check(free_check, ok);
    report_check(bc_check, ok);
  }
  return ok;
}

bool verify_oracle_match(int n_max, std::uint64_t seed, int cases) {
  bool ok = true;
  SplitMix64 rng(seed + 2);
  for (int n = 1; n <= std::min(n_max, 3); ++n) {
    const double tol = n <= 2 ? 1e-8 : 1e-6;
    const int runs = n == 3 ? std::min(cases, 5) : cases;
    CheckOutcome check{"formula_vs_oracle", n, runs, 0.0, tol};
    for (int c = 0; c < runs; ++c) {
      const RateProfile profile = random_profile(rng);
      const StateVector Y = random_ordered_state(n, -2, 2, rng);
      const StateVector X = random_reachable_target(Y, 4, rng);
      const double t = rng.uniform(0.0, 1.5);
      TransitionRequest req{Y, X, t, profile, {}};
      const double formula = transition_probability(req).p;
      const double truth = oracle_prob(Y, X, t, profile, n == 3 ? 1e-9 : 1e-10);
      check.worst = std::max(check.worst, std::abs(formula - truth));
    }
    report_check(check, ok);
  }
  return ok;
}

int run_verify(const std::string& suite, int n_max, std::uint64_t seed, int cases) {
  Timer timer;
  bool ok = true;
  if (suite == "identities" || suite == "all") ok = verify_identities(std::min(n_max, 8), seed, cases) && ok;
  if (suite == "residuals" || suite == "all")
    ok = verify_residuals(n_max, seed, std::min(cases, 20)) && ok;
  if (suite == "oracle-match" || suite == "all")
    ok = verify_oracle_match(n_max, seed, std::min(cases, 30)) && ok;
  std::cerr << (ok ? "verification passed" : "verification FAILED") << " [" << timer.ms()
            << " ms]\n";
  return ok ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) g_command.emplace_back(argv[i]);

  CLI::App app{"q-TAZRP transition probabilities: Bethe contour formula, master-equation oracle, "
               "Gillespie simulator"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "cap worker threads (0 = auto)");
  app.add_flag("--csv", g_csv, "tabular CSV output instead of JSON lines");

  std::string from, to, rates, suite = "all";
  double t = 0.0, eps = 1e-10;
  long trials = 100000;
  std::uint64_t seed = 1;
  int n_max = 6, cases = 100;
  bool cross_check = false;
  std::vector<std::string> targets;
  ContourFlags prob_flags, step_flags;

  CLI::App* prob = app.add_subcommand("prob", "P_Y(X;t) by the Bethe contour formula");
  prob->add_option("--from", from, "initial state y1,y2,... (descending)")->required();
  prob->add_option("--to", to, "final state x1,x2,... (descending)")->required();
  prob->add_option("--t", t, "time horizon")->required();
  prob->add_option("--rates", rates, "rate profile JSON file")->required();
  prob_flags.attach(prob);

  CLI::App* step = app.add_subcommand("step-prob", "step initial condition (all particles at 0)");
  step->add_option("--to", to, "final state x1,x2,... (descending)")->required();
  step->add_option("--t", t, "time horizon")->required();
  step->add_option("--rates", rates, "rate profile JSON file")->required();
  step->add_flag("--cross-check", cross_check, "also evaluate the full permutation sum and report the delta");
  step_flags.attach(step);

  CLI::App* oracle = app.add_subcommand("oracle", "master-equation ground truth");
  oracle->add_option("--from", from)->required();
  oracle->add_option("--to", to)->required();
  oracle->add_option("--t", t)->required();
  oracle->add_option("--rates", rates)->required();
  oracle->add_option("--eps", eps, "window truncation bound");

  CLI::App* sim = app.add_subcommand("simulate", "Gillespie estimates");
  sim->add_option("--from", from)->required();
  sim->add_option("--t", t)->required();
  sim->add_option("--rates", rates)->required();
  sim->add_option("--trials", trials);
  sim->add_option("--seed", seed);
  sim->add_option("--targets", targets, "semicolon-separated target states")->delimiter(';');

  CLI::App* verify = app.add_subcommand("verify", "property suites");
  verify->add_option("--suite", suite)
      ->check(CLI::IsMember({"identities", "residuals", "oracle-match", "all"}));
  verify->add_option("--n-max", n_max);
  verify->add_option("--seed", seed);
  verify->add_option("--cases", cases, "cases per check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  set_max_threads(threads);
  try {
    if (prob->parsed()) return run_prob(from, to, t, rates, prob_flags);
    if (step->parsed()) return run_step_prob(to, t, rates, step_flags, cross_check);
    if (oracle->parsed()) return run_oracle(from, to, t, rates, eps);
    if (sim->parsed()) return run_simulate(from, t, trials, seed, rates, targets);
    if (verify->parsed()) return run_verify(suite, n_max, seed, cases);
  } catch (const HorizonError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceCapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
