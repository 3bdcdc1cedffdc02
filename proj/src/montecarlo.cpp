#include "qtazrp/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>

#include "qtazrp/parallel.hpp"

namespace qtazrp {

namespace {

double q_power(double q, int h) {
  double p = 1.0;
  for (int i = 0; i < h; ++i) p *= q;
  return p;
}

struct ActiveStack {
  std::size_t top_index;  // first particle of the run
  int site;
  double rate;
};

}  // namespace

StateVector simulate_one(const StateVector& Y, double t, const RateProfile& profile,
                         SplitMix64& stream) {
  if (!Y.ordered()) throw StateOrderError("simulate_one: Y must lie in W^n");
  if (!(t >= 0.0)) throw std::invalid_argument("simulate_one: t must be nonnegative");

  std::vector<int> coords = Y.coords();
  const double q = profile.q();
  std::vector<ActiveStack> active;
  double time = 0.0;

  for (;;) {
    active.clear();
    double total = 0.0;
    std::size_t k = 0;
    while (k < coords.size()) {
      std::size_t end = k;
      while (end + 1 < coords.size() && coords[end + 1] == coords[k]) ++end;
      const int height = static_cast<int>(end - k + 1);
      const double rate = profile.a(coords[k]) * (1.0 - q_power(q, height));
      active.push_back({k, coords[k], rate});
      total += rate;
      k = end + 1;
    }

    time += stream.exponential(total);
    if (time > t) break;

    double pick = stream.uniform01() * total;
    std::size_t chosen = active.size() - 1;
    for (std::size_t s = 0; s < active.size(); ++s) {
      pick -= active[s].rate;
      if (pick <= 0.0) {
        chosen = s;
        break;
      }
    }
    coords[active[chosen].top_index] += 1;

    for (std::size_t i = 1; i < coords.size(); ++i)
      if (coords[i - 1] < coords[i])
        throw std::logic_error("simulate_one: particle order violated");
  }
  return StateVector(std::move(coords));
}

std::vector<Estimate> estimate_prob(const SimConfig& config,
                                    const std::vector<StateVector>& targets) {
  if (config.trials < 1) throw std::invalid_argument("estimate_prob: trials must be >= 1");
  std::vector<std::atomic<long>> hits(targets.size());
  for (auto& h : hits) h.store(0);

  parallel_for(config.trials, [&](long trial) {
    SplitMix64 stream = SplitMix64::substream(config.seed, static_cast<std::uint64_t>(trial));
    const StateVector end = simulate_one(config.Y, config.t, config.profile, stream);
    for (std::size_t i = 0; i < targets.size(); ++i)
      if (end.coords() == targets[i].coords()) hits[i].fetch_add(1);
  });

  std::vector<Estimate> out;
  out.reserve(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const long h = hits[i].load();
    const double p = static_cast<double>(h) / static_cast<double>(config.trials);
    out.push_back({targets[i], p, std::sqrt(p * (1.0 - p) / static_cast<double>(config.trials)), h,
                   config.trials});
  }
  return out;
}

std::vector<Estimate> estimate_all_states(const SimConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("estimate_all_states: trials must be >= 1");
  std::map<std::vector<int>, long, std::greater<std::vector<int>>> counts;
  for (long trial = 0; trial < config.trials; ++trial) {
    SplitMix64 stream = SplitMix64::substream(config.seed, static_cast<std::uint64_t>(trial));
    const StateVector end = simulate_one(config.Y, config.t, config.profile, stream);
    counts[end.coords()] += 1;
  }
  std::vector<Estimate> out;
  out.reserve(counts.size());
  for (const auto& [coords, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(config.trials);
    out.push_back({StateVector(coords), p,
                   std::sqrt(p * (1.0 - p) / static_cast<double>(config.trials)), c,
                   config.trials});
  }
  return out;
}

}  // namespace qtazrp
