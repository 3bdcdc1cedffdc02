#ifndef QTAZRP_ORACLE_HPP
#define QTAZRP_ORACLE_HPP

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "qtazrp/qcore.hpp"

namespace qtazrp {

/// All X in W^n with y_k <= x_k <= ceiling, enumerated in lexicographic
/// descending order.  Truncation of the infinite lattice; the ceiling is
/// chosen so the escaping mass is provably below the caller's eps.
class StateWindow {
 public:
  static StateWindow build(const StateVector& Y, int ceiling, std::size_t state_cap = 2000000);

  const StateVector& floor_state() const { return floor_; }
  int ceiling() const { return ceiling_; }
  std::size_t size() const { return states_.size(); }
  const std::vector<int>& state(std::size_t i) const { return states_[i]; }
  /// Ordinal of a state, or -1 when outside the window.
  long find(const std::vector<int>& coords) const;

 private:
  StateWindow(StateVector floor, int ceiling) : floor_(std::move(floor)), ceiling_(ceiling) {}
  StateVector floor_;
  int ceiling_;
  std::vector<std::vector<int>> states_;
  std::unordered_map<std::uint64_t, std::vector<long>> index_;  // hash -> ordinals
};

/// Sparse generator on the window.  Jumps that would cross the ceiling are
/// recorded as leak toward an absorbing cell, not dropped, so every reported
/// mass carries a one-sided error bound.
struct Generator {
  std::vector<std::vector<std::pair<long, double>>> out;  // per-state (target, rate)
  std::vector<double> exit_rate;                          // total outflow incl. leak
  std::vector<double> leak_rate;                          // ceiling-crossing part
  double lambda_max = 0.0;                                // uniformization constant
};

Generator build_generator(const StateWindow& window, const RateProfile& profile);

struct Distribution {
  std::vector<double> mass;
  double leak = 0.0;

  double total() const;
};

/// Uniformization: P(t) = sum_m e^{-Lt}(Lt)^m/m! S^m P(0), S = I + H/L,
/// truncated when the remaining Poisson tail is below 1e-14.
Distribution evolve(const Generator& gen, const Distribution& initial, double t);

/// Smallest displacement K such that P(Poisson(n a_max t) >= K) < eps; the
/// window ceiling max(Y) + K then bounds the escaping probability by eps.
int window_bound(int n, double t, const RateProfile& profile, double eps);

/// Full ground-truth solve from Y at time t, window chosen via window_bound.
struct OracleRun {
  StateWindow window;
  Distribution dist;
};

OracleRun oracle_distribution(const StateVector& Y, double t, const RateProfile& profile,
                              double eps);

/// Ground-truth P_Y(X;t) within eps + series truncation.
double oracle_prob(const StateVector& Y, const StateVector& X, double t,
                   const RateProfile& profile, double eps);

}  // namespace qtazrp

#endif
