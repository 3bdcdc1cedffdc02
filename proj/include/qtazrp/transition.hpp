#ifndef QTAZRP_TRANSITION_HPP
#define QTAZRP_TRANSITION_HPP

#include <span>
#include <vector>

#include "qtazrp/bethe.hpp"
#include "qtazrp/qcore.hpp"
#include "qtazrp/quadrature.hpp"

namespace qtazrp {

/// User-facing contour knobs.  radius = 0 means choose automatically from the
/// rate profile and the two states, then multiply by radius_scale.  rt_cap
/// bounds R*t: past it the e^{Rt} cancellation on the contour destroys double
/// precision, so the evaluation refuses and points at the oracle instead.
struct ContourOptions {
  double radius = 0.0;
  double radius_scale = 1.0;
  int nodes = 64;
  int max_nodes = 1024;
  double tol = 1e-10;
  double rt_cap = 40.0;

  ContourSpec resolve(double auto_radius) const;
};

struct TransitionRequest {
  StateVector Y;
  StateVector X;
  double t = 0.0;
  RateProfile profile;
  ContourOptions contour{};
};

struct ProbabilityResult {
  double p = 0.0;              // real part of the assembled sum (unclamped)
  double imag_leak = 0.0;      // largest |Im| discarded anywhere in the assembly
  double estimated_error = 0.0;
  double radius = 0.0;
  int nodes_max = 0;
  bool converged = false;
  std::vector<QuadratureResult> per_permutation;  // lexicographic sigma order

  double clamped() const { return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p); }
};

/// Complex-valued diagnostics (unnormalized sums and residuals).
struct ComplexResult {
  cplx value{0.0, 0.0};
  double scale = 1.0;  // magnitude reference for residual tolerances
  double estimated_error = 0.0;
  double radius = 0.0;
  int nodes_max = 0;
  bool converged = false;
};

/// P_Y(X;t) = (1/W(X)) sum_{sigma in S_n} Lambda_Y(X;t;sigma), each Lambda a
/// contoured n-fold integral carrying the prod_k(-1/b_{x_k}) prefactor.
ProbabilityResult transition_probability(const TransitionRequest& req);

/// Closed-form single-particle probability: 0 left of the start, e^{-b_y t}
/// at the start, otherwise the residue sum over b_y..b_x; falls back to the
/// one-variable contour when b values in the range nearly coincide.
double one_particle_prob(int y, int x, double t, const RateProfile& profile);

/// Step initial condition Y = (0,...,0): the collapsed single integral
/// [n]_q! (1/W(X)) prod_k(-1/b_{x_k}) * contour-integral of B(w) * chains.
ProbabilityResult step_init_prob(const StateVector& X, double t, const RateProfile& profile,
                                 const ContourOptions& contour = {});

/// Unnormalized Bethe sum u0_Y(X;t) = sum_sigma Lambda_Y(X;t;sigma); defined
/// for relaxed X in Z^n.
ComplexResult u0_sum(const StateVector& X, const StateVector& Y, double t,
                     const RateProfile& profile, const ContourOptions& contour = {});

/// d/dt u0 (computed analytically inside the integrand) minus
/// sum_k [ b_{x_k - 1} u0(X^{k,-}) - b_{x_k} u0(X) ].
ComplexResult free_evolution_residual(const StateVector& X, const StateVector& Y, double t,
                                      const RateProfile& profile, const ContourOptions& contour = {});

/// b_{x-1} u0(..., x-1, x, ...) - q b_{x-1} u0(..., x, x-1, ...)
///   - (1-q) b_x u0(..., x, x, ...), the pair sitting at positions k, k+1 of
/// context (whose entries at those slots are ignored).
ComplexResult boundary_residual(int k, int x, const StateVector& context, const StateVector& Y,
                                double t, const RateProfile& profile,
                                const ContourOptions& contour = {});

}  // namespace qtazrp

#endif
