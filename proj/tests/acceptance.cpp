// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Every tolerance is pinned here; nothing defers to later calibration.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qtazrp/bethe.hpp"
#include "qtazrp/montecarlo.hpp"
#include "qtazrp/oracle.hpp"
#include "qtazrp/rng.hpp"
#include "qtazrp/transition.hpp"
#include "support.hpp"

using namespace qtazrp;
using testsupport::random_circle_point;
using testsupport::random_ordered_state;
using testsupport::random_reachable_target;

namespace {

int g_failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(int criterion, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[%s] criterion %2d: %-28s %s (%.1f s)\n", pass ? "PASS" : "FAIL", criterion,
              name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string max_str(const char* label, double v) {
  std::ostringstream os;
  os << label << " " << v;
  return os.str();
}

/// Inhomogeneous profile with an independent rate on every site of the
/// working window, a_i in [0.5, 2], q in {0.3, 0.5, 0.7}.
RateProfile dense_profile(SplitMix64& rng, int lo, int hi) {
  static const double qs[3] = {0.3, 0.5, 0.7};
  const double q = qs[rng.uniform_int(0, 2)];
  std::map<int, double> overrides;
  for (int s = lo; s <= hi; ++s) overrides[s] = rng.uniform(0.5, 2.0);
  return RateProfile(rng.uniform(0.5, 2.0), QParams(q), std::move(overrides));
}

RateProfile sparse_profile(SplitMix64& rng) {
  static const double qs[3] = {0.3, 0.5, 0.7};
  const double q = qs[rng.uniform_int(0, 2)];
  std::map<int, double> overrides;
  const int n_over = static_cast<int>(rng.uniform_int(0, 4));
  for (int i = 0; i < n_over; ++i)
    overrides[static_cast<int>(rng.uniform_int(-4, 8))] = rng.uniform(0.5, 2.0);
  return RateProfile(rng.uniform(0.5, 2.0), QParams(q), std::move(overrides));
}

// --- criterion 1: one-particle exactness ------------------------------------

void criterion_1() {
  Timer timer;
  double worst = 0.0;
  SplitMix64 rng(1001);
  for (int c = 0; c < 50; ++c) {
    const int y = static_cast<int>(rng.uniform_int(-3, 3));
    const int x = y + static_cast<int>(rng.uniform_int(0, 8));
    const double t = rng.uniform(0.0, 2.0);
    // 40 dense (all-distinct rates: residue branch), 10 sparse (confluent).
    const RateProfile profile =
        c < 40 ? dense_profile(rng, y - 2, x + 2) : sparse_profile(rng);

    const double closed = one_particle_prob(y, x, t, profile);
    const double bethe =
        transition_probability({StateVector({y}), StateVector({x}), t, profile, {}}).p;
    const double truth = oracle_prob(StateVector({y}), StateVector({x}), t, profile, 1e-10);
    worst = std::max({worst, std::abs(closed - bethe), std::abs(closed - truth),
                      std::abs(bethe - truth)});
  }
  const double sec = timer.seconds();
  report(1, "one-particle exactness", worst < 1e-8 && sec < 10.0,
         max_str("max pairwise delta", worst), sec);
}

// --- criterion 2 (+10): full permutation sum vs oracle, radius robustness ---

struct PanelCase {
  StateVector Y, X;
  double t;
  RateProfile profile;
  double formula = 0.0;
};

std::vector<PanelCase> build_panel(int n, int count, std::uint64_t seed) {
  std::vector<PanelCase> panel;
  SplitMix64 rng(seed);
  for (int c = 0; c < count; ++c) {
    const StateVector Y = random_ordered_state(n, -2, 2, rng);
    const StateVector X = random_reachable_target(Y, 4, rng);
    const double t = rng.uniform(0.0, 2.0);
    panel.push_back({Y, X, t, sparse_profile(rng)});
  }
  return panel;
}

std::vector<PanelCase> g_panel2, g_panel3;

void criterion_2() {
  Timer timer;
  g_panel2 = build_panel(2, 30, 2002);
  g_panel3 = build_panel(3, 15, 2003);
  double worst2 = 0.0, worst3 = 0.0;
  for (auto& pc : g_panel2) {
    pc.formula = transition_probability({pc.Y, pc.X, pc.t, pc.profile, {}}).p;
    worst2 = std::max(worst2, std::abs(pc.formula - oracle_prob(pc.Y, pc.X, pc.t, pc.profile, 1e-10)));
  }
  for (auto& pc : g_panel3) {
    pc.formula = transition_probability({pc.Y, pc.X, pc.t, pc.profile, {}}).p;
    worst3 = std::max(worst3, std::abs(pc.formula - oracle_prob(pc.Y, pc.X, pc.t, pc.profile, 1e-9)));
  }
  const double sec = timer.seconds();
  std::ostringstream os;
  os << "max delta n=2 " << worst2 << ", n=3 " << worst3;
  report(2, "permutation sum vs oracle", worst2 < 1e-8 && worst3 < 1e-6 && sec < 300.0, os.str(),
         sec);
}

void criterion_10() {
  Timer timer;
  double worst = 0.0;
  ContourOptions scaled;
  scaled.radius_scale = 1.25;
  for (const auto& pc : g_panel2) {
    const double p = transition_probability({pc.Y, pc.X, pc.t, pc.profile, scaled}).p;
    worst = std::max(worst, std::abs(p - pc.formula));
  }
  for (const auto& pc : g_panel3) {
    const double p = transition_probability({pc.Y, pc.X, pc.t, pc.profile, scaled}).p;
    worst = std::max(worst, std::abs(p - pc.formula));
  }
  report(10, "contour radius robustness", worst < 10.0 * 1e-10, max_str("max delta", worst),
         timer.seconds());
}

// --- criterion 3: n=4 smoke --------------------------------------------------

void criterion_3() {
  Timer timer;
  const RateProfile profile(1.0, QParams(0.5));
  const StateVector Y({0, 0, 0, 0}), X({2, 1, 1, 0});
  const double t = 0.5;
  ContourOptions opts;
  opts.nodes = 64;
  opts.max_nodes = 64;  // single fixed grid, per the smoke-test budget
  const double formula = transition_probability({Y, X, t, profile, opts}).p;
  const double truth = oracle_prob(Y, X, t, profile, 1e-7);
  const double delta = std::abs(formula - truth);
  const double sec = timer.seconds();
  report(3, "n=4 smoke test", delta < 1e-4 && sec < 900.0, max_str("delta", delta), sec);
}

// --- criterion 4: initial condition recovery ---------------------------------

void criterion_4() {
  Timer timer;
  double worst = 0.0;
  SplitMix64 rng(4004);
  int states = 0;
  // Mixed panel over n = 1..3, including stacked coordinates.
  const std::vector<std::vector<int>> ys = {{0}, {2}, {1, 0}, {0, 0}, {2, 2}, {3, 1, 0}, {1, 1, 0}};
  for (const auto& yc : ys) {
    const StateVector Y(yc);
    const RateProfile profile = sparse_profile(rng);
    // X = Y must give 1.
    const double at_start = transition_probability({Y, Y, 0.0, profile, {}}).p;
    worst = std::max(worst, std::abs(at_start - 1.0));
    ++states;
    // Two reachable non-start states must give ~0.
    for (int k = 0; k < 2 && states < 20; ++k) {
      StateVector X = random_reachable_target(Y, 2, rng);
      if (X == Y) {
        std::vector<int> c = Y.coords();
        c[0] += 1;
        X = StateVector(std::move(c));
      }
      worst = std::max(worst, std::abs(transition_probability({Y, X, 0.0, profile, {}}).p));
      ++states;
    }
  }
  report(4, "t=0 initial condition", worst < 1e-8 && states >= 20,
         max_str("max |P - delta_XY|", worst), timer.seconds());
}

// --- criterion 5: step-initial equivalence ------------------------------------

void criterion_5() {
  Timer timer;
  double worst = 0.0;
  SplitMix64 rng(5005);
  for (int c = 0; c < 10; ++c) {
    const int n = 1 + c % 3;
    const StateVector zero(std::vector<int>(static_cast<std::size_t>(n), 0));
    const StateVector X = random_reachable_target(zero, 3, rng);
    const double t = rng.uniform(0.0, 1.5);
    const RateProfile profile = sparse_profile(rng);
    const double step = step_init_prob(X, t, profile).p;
    const double thm = transition_probability({zero, X, t, profile, {}}).p;
    worst = std::max(worst, std::abs(step - thm));
  }
  report(5, "step-initial equivalence", worst < 1e-8, max_str("max delta", worst), timer.seconds());
}

// --- criterion 6: symmetric-group identities -----------------------------------

void criterion_6() {
  Timer timer;
  double worst_perm = 0.0, worst_c = 0.0;
  SplitMix64 rng(6006);
  for (int n = 1; n <= 6; ++n) {
    for (int c = 0; c < 100; ++c) {
      const double q = rng.uniform(0.2, 0.8);
      const ComplexPoint w = random_circle_point(n, q, rng.uniform(2.0, 4.0), rng);
      const QParams qp(q);
      worst_perm = std::max(worst_perm, std::abs(perm_sum_identity_residual(w, qp)));
      const double target = (1.0 - std::pow(q, n)) / (1.0 - q);
      worst_c = std::max(worst_c, std::abs(c_function(w, qp) - target));
    }
  }
  const double sec = timer.seconds();
  std::ostringstream os;
  os << "max perm-sum " << worst_perm << ", max C " << worst_c;
  report(6, "symmetric-group identities", worst_perm < 1e-10 && worst_c < 1e-10 && sec < 30.0, os.str(),
         sec);
}

// --- criterion 7: evolution/boundary residuals ---------------------------------

void criterion_7() {
  Timer timer;
  bool pass = true;
  std::ostringstream os;
  SplitMix64 rng(7007);
  for (int n = 2; n <= 3; ++n) {
    const double tol = n == 2 ? 1e-7 : 1e-6;
    double worst_free = 0.0, worst_bc = 0.0;
    for (int c = 0; c < 20; ++c) {
      const RateProfile profile = sparse_profile(rng);
      const StateVector Y = random_ordered_state(n, -2, 2, rng);
      const double t = rng.uniform(0.0, 1.2);

      std::vector<int> xc(static_cast<std::size_t>(n));
      for (auto& v : xc) v = static_cast<int>(rng.uniform_int(-3, 5));
      const auto fr = free_evolution_residual(StateVector::relaxed(xc), Y, t, profile);
      worst_free = std::max(worst_free, std::abs(fr.value) / fr.scale);

      const int k = static_cast<int>(rng.uniform_int(1, n - 1));
      const int x = static_cast<int>(rng.uniform_int(-1, 4));
      std::vector<int> ctx(static_cast<std::size_t>(n));
      for (auto& v : ctx) v = static_cast<int>(rng.uniform_int(-2, 5));
      const auto br = boundary_residual(k, x, StateVector::relaxed(ctx), Y, t, profile);
      worst_bc = std::max(worst_bc, std::abs(br.value) / br.scale);
    }
    pass = pass && worst_free < tol && worst_bc < tol;
    os << "n=" << n << " free " << worst_free << " boundary " << worst_bc << "  ";
  }
  report(7, "evolution/boundary residuals", pass, os.str(), timer.seconds());
}

// --- criterion 8: normalization ------------------------------------------------

void criterion_8() {
  Timer timer;
  bool pass = true;
  std::ostringstream os;
  SplitMix64 rng(8008);
  const struct {
    std::vector<int> y;
    double t;
  } cases[] = {{{0}, 2.0}, {{1, 0}, 1.5}, {{0, 0, 0}, 0.5}};
  for (const auto& c : cases) {
    const StateVector Y(c.y);
    RateProfile profile(1.0, QParams(0.5),
                        {{0, rng.uniform(0.6, 1.2)}, {2, rng.uniform(0.6, 1.2)}});
    const OracleRun run = oracle_distribution(Y, c.t, profile, 1e-8);
    double total = 0.0;
    for (std::size_t i = 0; i < run.window.size(); ++i) {
      const StateVector X(run.window.state(i));
      total += transition_probability({Y, X, c.t, profile, {}}).p;
    }
    const double err = std::abs(total - 1.0);
    const double budget = 1e-6 + run.dist.leak;
    pass = pass && err <= budget;
    os << "n=" << Y.n() << " |sum-1| " << err << " (leak " << run.dist.leak << ")  ";
  }
  report(8, "normalization over window", pass, os.str(), timer.seconds());
}

// --- criterion 9: Monte Carlo consistency ---------------------------------------

std::string estimates_fingerprint(const std::vector<Estimate>& est) {
  std::ostringstream os;
  for (const auto& e : est) os << to_string(e.target) << ":" << e.hits << ";";
  return os.str();
}

void criterion_9() {
  Timer timer;
  const RateProfile profile(1.0, QParams(0.5));
  const StateVector Y({0, 0});
  const double t = 1.0;

  // Panel: the ten highest-mass oracle states.
  const OracleRun run = oracle_distribution(Y, t, profile, 1e-10);
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < run.window.size(); ++i) ranked.push_back({run.dist.mass[i], i});
  std::sort(ranked.begin(), ranked.end(), std::greater<>());
  std::vector<StateVector> targets;
  std::vector<double> truth;
  for (int i = 0; i < 10; ++i) {
    targets.push_back(StateVector(run.window.state(ranked[static_cast<std::size_t>(i)].second)));
    truth.push_back(ranked[static_cast<std::size_t>(i)].first);
  }

  SimConfig config{Y, t, 100000, 90909, profile};
  const auto est = estimate_prob(config, targets);
  int within = 0;
  for (std::size_t i = 0; i < est.size(); ++i)
    if (std::abs(est[i].p_hat - truth[i]) <= 4.0 * est[i].std_err) ++within;

  const auto rerun = estimate_prob(config, targets);
  const bool identical = estimates_fingerprint(est) == estimates_fingerprint(rerun);

  const double sec = timer.seconds();
  std::ostringstream os;
  os << within << "/10 within 4 sigma, rerun " << (identical ? "identical" : "DIFFERS");
  report(9, "Monte Carlo consistency",
         within >= 10 * 0.95 && identical && sec < 60.0, os.str(), sec);
}

}  // namespace

int main() {
  std::printf("q-TAZRP acceptance suite\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (g_failures > 0) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
