#include "qtazrp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace qtazrp {

namespace {

std::uint64_t hash_coords(const std::vector<int>& c) {
  std::uint64_t h = 0x9E3779B97F4A7C15ULL;
  for (int v : c) {
    std::uint64_t z = h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) + 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    h = z ^ (z >> 31);
  }
  return h;
}

double q_power(double q, int h) {
  double p = 1.0;
  for (int i = 0; i < h; ++i) p *= q;
  return p;
}

}  // namespace

StateWindow StateWindow::build(const StateVector& Y, int ceiling, std::size_t state_cap) {
  if (!Y.ordered()) throw StateOrderError("StateWindow: floor state must lie in W^n");
  if (ceiling < Y.max_coord())
    throw std::invalid_argument("StateWindow: ceiling below the floor state");

  StateWindow w(Y, ceiling);
  const int n = Y.n();
  std::vector<int> coords(static_cast<std::size_t>(n));
  // Descending lexicographic enumeration of x_k in [y_k, min(x_{k-1}, ceiling)].
  std::function<void(int, int)> emit = [&](int k, int upper) {
    if (k > n) {
      if (w.states_.size() >= state_cap)
        throw ResourceCapError("StateWindow: state count exceeds cap of " +
                               std::to_string(state_cap));
      w.states_.push_back(coords);
      return;
    }
    for (int v = upper; v >= Y.at(k); --v) {
      coords[static_cast<std::size_t>(k - 1)] = v;
      emit(k + 1, v);
    }
  };
  emit(1, ceiling);
  w.index_.reserve(w.states_.size() * 2);
  for (std::size_t i = 0; i < w.states_.size(); ++i)
    w.index_[hash_coords(w.states_[i])].push_back(static_cast<long>(i));
  return w;
}

long StateWindow::find(const std::vector<int>& coords) const {
  auto it = index_.find(hash_coords(coords));
  if (it == index_.end()) return -1;
  for (long i : it->second)
    if (states_[static_cast<std::size_t>(i)] == coords) return i;
  return -1;
}

Generator build_generator(const StateWindow& window, const RateProfile& profile) {
  Generator gen;
  const std::size_t count = window.size();
  gen.out.resize(count);
  gen.exit_rate.assign(count, 0.0);
  gen.leak_rate.assign(count, 0.0);
  const double q = profile.q();

  std::vector<int> target;
  for (std::size_t i = 0; i < count; ++i) {
    const std::vector<int>& c = window.state(i);
    // Walk the stacks: runs of equal coordinates; the top particle of a run
    // is its first (lowest-index) member.
    std::size_t k = 0;
    while (k < c.size()) {
      std::size_t end = k;
      while (end + 1 < c.size() && c[end + 1] == c[k]) ++end;
      const int site = c[k];
      const int height = static_cast<int>(end - k + 1);
      const double rate = profile.a(site) * (1.0 - q_power(q, height));
      gen.exit_rate[i] += rate;
      if (site + 1 > window.ceiling()) {
        gen.leak_rate[i] += rate;
      } else {
        target = c;
        target[k] += 1;
        const long j = window.find(target);
        if (j < 0)
          throw std::logic_error("build_generator: in-window jump target not enumerated");
        gen.out[i].emplace_back(j, rate);
      }
      k = end + 1;
    }
    gen.lambda_max = std::max(gen.lambda_max, gen.exit_rate[i]);
  }
  return gen;
}

double Distribution::total() const {
  double s = leak;
  for (double m : mass) s += m;
  return s;
}

Distribution evolve(const Generator& gen, const Distribution& initial, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("evolve: t must be nonnegative");
  const std::size_t count = initial.mass.size();
  if (gen.out.size() != count) throw std::invalid_argument("evolve: generator/distribution size mismatch");

  const double L = gen.lambda_max;
  if (t == 0.0 || L == 0.0) return initial;
  const double Lt = L * t;

  std::vector<double> v = initial.mass;
  double v_leak = initial.leak;
  Distribution res;
  res.mass.assign(count, 0.0);
  res.leak = 0.0;

  // Poisson-weighted powers of S = I + H/L, truncated at tail < 1e-14.
  double weight = std::exp(-Lt);
  double cum = weight;
  for (std::size_t i = 0; i < count; ++i) res.mass[i] += weight * v[i];
  res.leak += weight * v_leak;

  std::vector<double> nv(count);
  const long m_cap = static_cast<long>(Lt + 60.0 * std::sqrt(Lt + 1.0) + 200.0);
  for (long m = 1; m <= m_cap && 1.0 - cum > 1e-14; ++m) {
    std::fill(nv.begin(), nv.end(), 0.0);
    double nleak = v_leak;
    for (std::size_t i = 0; i < count; ++i) {
      const double vi = v[i];
      if (vi == 0.0) continue;
      nv[i] += (1.0 - gen.exit_rate[i] / L) * vi;
      for (const auto& [j, rate] : gen.out[i]) nv[static_cast<std::size_t>(j)] += rate / L * vi;
      nleak += gen.leak_rate[i] / L * vi;
    }
    v.swap(nv);
    v_leak = nleak;
    weight *= Lt / static_cast<double>(m);
    cum += weight;
    for (std::size_t i = 0; i < count; ++i) res.mass[i] += weight * v[i];
    res.leak += weight * v_leak;
  }
  return res;
}

int window_bound(int n, double t, const RateProfile& profile, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("window_bound: eps must be positive");
  if (!(t >= 0.0)) throw std::invalid_argument("window_bound: t must be nonnegative");
  const double lambda = n * profile.max_a() * t;
  if (lambda == 0.0) return 1;
  if (lambda > 600.0)
    throw ResourceCapError("window_bound: Poisson rate too large to bound usefully");

  // Direct tail evaluation in extended precision: no 1 - cdf cancellation.
  const int m_hi = static_cast<int>(lambda + 60.0 * std::sqrt(lambda + 1.0) + 60.0);
  std::vector<long double> pmf(static_cast<std::size_t>(m_hi) + 1);
  pmf[0] = std::exp(static_cast<long double>(-lambda));
  for (int m = 1; m <= m_hi; ++m)
    pmf[static_cast<std::size_t>(m)] = pmf[static_cast<std::size_t>(m - 1)] * lambda / m;
  long double tail = 0.0;
  int K = m_hi + 1;
  for (int m = m_hi; m >= 1; --m) {
    tail += pmf[static_cast<std::size_t>(m)];
    if (tail >= static_cast<long double>(eps)) {
      K = m + 1;
      break;
    }
    K = m;
  }
  return std::max(K, 1);
}

OracleRun oracle_distribution(const StateVector& Y, double t, const RateProfile& profile,
                              double eps) {
  const int K = window_bound(Y.n(), t, profile, eps);
  StateWindow window = StateWindow::build(Y, Y.max_coord() + K);
  const Generator gen = build_generator(window, profile);
  Distribution init;
  init.mass.assign(window.size(), 0.0);
  const long y_idx = window.find(Y.coords());
  init.mass[static_cast<std::size_t>(y_idx)] = 1.0;
  Distribution dist = evolve(gen, init, t);
  return {std::move(window), std::move(dist)};
}

double oracle_prob(const StateVector& Y, const StateVector& X, double t,
                   const RateProfile& profile, double eps) {
  if (!Y.ordered() || !X.ordered())
    throw StateOrderError("oracle_prob: states must lie in W^n");
  if (X.n() != Y.n()) throw std::invalid_argument("oracle_prob: dimension mismatch");
  OracleRun run = oracle_distribution(Y, t, profile, eps);
  const long idx = run.window.find(X.coords());
  return idx < 0 ? 0.0 : run.dist.mass[static_cast<std::size_t>(idx)];
}

}  // namespace qtazrp
