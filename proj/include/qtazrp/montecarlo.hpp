#ifndef QTAZRP_MONTECARLO_HPP
#define QTAZRP_MONTECARLO_HPP

#include <cstdint>
#include <vector>

#include "qtazrp/qcore.hpp"
#include "qtazrp/rng.hpp"

namespace qtazrp {

struct SimConfig {
  StateVector Y;
  double t = 0.0;
  long trials = 1;
  std::uint64_t seed = 0;
  RateProfile profile;
};

struct Estimate {
  StateVector target;
  double p_hat = 0.0;
  double std_err = 0.0;  // sqrt(p_hat (1 - p_hat) / trials)
  long hits = 0;
  long trials = 0;
};

/// One Gillespie trajectory from Y over [0, t]: stacks fire independently at
/// rate a_s (1 - q^h), the chosen stack's top particle hops one site right.
StateVector simulate_one(const StateVector& Y, double t, const RateProfile& profile,
                         SplitMix64& stream);

/// Hit frequencies for the targets over config.trials independent trajectories
/// (substream per trial, so the result depends only on seed/config, not on
/// thread count).
std::vector<Estimate> estimate_prob(const SimConfig& config,
                                    const std::vector<StateVector>& targets);

/// Sorted (lexicographic descending) list of distinct end states with their
/// estimates; used when no explicit targets are requested.
std::vector<Estimate> estimate_all_states(const SimConfig& config);

}  // namespace qtazrp

#endif
