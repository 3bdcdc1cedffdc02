#ifndef QTAZRP_TESTS_SUPPORT_HPP
#define QTAZRP_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "qtazrp/bethe.hpp"
#include "qtazrp/qcore.hpp"
#include "qtazrp/rng.hpp"

namespace testsupport {

using namespace qtazrp;

inline RateProfile random_profile(SplitMix64& rng, int site_lo = -5, int site_hi = 10) {
  static const double qs[3] = {0.3, 0.5, 0.7};
  const double q = qs[rng.uniform_int(0, 2)];
  std::map<int, double> overrides;
  const int n_over = static_cast<int>(rng.uniform_int(0, 5));
  for (int i = 0; i < n_over; ++i)
    overrides[static_cast<int>(rng.uniform_int(site_lo, site_hi))] = rng.uniform(0.5, 2.0);
  return RateProfile(rng.uniform(0.5, 2.0), QParams(q), std::move(overrides));
}

inline StateVector random_ordered_state(int n, int lo, int hi, SplitMix64& rng) {
  std::vector<int> c(static_cast<std::size_t>(n));
  for (auto& v : c) v = static_cast<int>(rng.uniform_int(lo, hi));
  std::sort(c.begin(), c.end(), std::greater<int>());
  return StateVector(std::move(c));
}

/// Target with x_k >= y_k componentwise: add nonnegative displacements, then
/// re-sort (sorting preserves the componentwise dominance).
inline StateVector random_reachable_target(const StateVector& Y, int max_step, SplitMix64& rng) {
  std::vector<int> c = Y.coords();
  for (auto& v : c) v += static_cast<int>(rng.uniform_int(0, max_step));
  std::sort(c.begin(), c.end(), std::greater<int>());
  return StateVector(std::move(c));
}

/// Points on a common circle with a healthy pairwise gap; satisfies the
/// well_separated contract by a wide margin so identity residuals stay at
/// rounding level.
inline ComplexPoint random_circle_point(int n, double q, double radius, SplitMix64& rng) {
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

}  // namespace testsupport

#endif
