#include "qtazrp/transition.hpp"

#include <algorithm>
#include <cmath>

namespace qtazrp {

ContourSpec ContourOptions::resolve(double auto_radius) const {
  ContourSpec s;
  s.radius = radius > 0.0 ? radius : auto_radius * radius_scale;
  s.nodes = nodes;
  s.max_nodes = max_nodes;
  s.tol = tol;
  return s;
}

namespace {

void check_horizon(const ContourSpec& spec, double t, const ContourOptions& opts) {
  if (spec.radius * t > opts.rt_cap)
    throw HorizonError("contour evaluation refused: R*t = " + std::to_string(spec.radius * t) +
                       " exceeds " + std::to_string(opts.rt_cap) +
                       "; e^{Rt} cancellation would destroy double precision. "
                       "Use the master-equation oracle for this horizon.");
}

double neg_inv_b_prefactor(const StateVector& X, const RateProfile& profile) {
  double p = 1.0;
  for (int k = 1; k <= X.n(); ++k) p *= -1.0 / profile.b(X.at(k));
  return p;
}

/// Integrand of Lambda_Y(X;t;sigma) in product form: per-variable chains
/// prod'_{k=y_v}^{x_{sigma^{-1}(v)}} b_k/(b_k - z) times e^{-zt}, coupled by
/// A_sigma (optionally times -(w_1+...+w_n) for the time derivative).
class LambdaIntegrand final : public ProductIntegrand {
 public:
  LambdaIntegrand(const StateVector& X, const StateVector& Y, const Permutation& sigma, double t,
                  const RateProfile& profile, bool time_derivative = false)
      : X_(X), Y_(Y), sigma_(sigma), t_(t), profile_(profile), ddt_(time_derivative) {}

  int dim() const override { return X_.n(); }

  cplx factor(int j, cplx z) const override {
    const int var = j + 1;
    const int pos = sigma_.preimage(var);
    const cplx chain = prod_prime([&](int k) { return profile_.b(k) / (profile_.b(k) - z); },
                                  Y_.at(var), X_.at(pos));
    return chain * std::exp(-z * t_);
  }

  cplx coupling(std::span<const cplx> w) const override {
    cplx a = a_sigma(sigma_, w, profile_.q_params());
    if (ddt_) {
      cplx s{};
      for (const cplx& v : w) s += v;
      a *= -s;
    }
    return a;
  }

 private:
  const StateVector& X_;
  const StateVector& Y_;
  const Permutation& sigma_;
  double t_;
  const RateProfile& profile_;
  bool ddt_;
};

/// Integrand of the collapsed step-initial-condition formula: chains start at
/// 0 and pair w_j with x_j directly; the coupling is B(w).
class StepIntegrand final : public ProductIntegrand {
 public:
  StepIntegrand(const StateVector& X, double t, const RateProfile& profile)
      : X_(X), t_(t), profile_(profile) {}

  int dim() const override { return X_.n(); }

  cplx factor(int j, cplx z) const override {
    const cplx chain =
        prod_prime([&](int k) { return profile_.b(k) / (profile_.b(k) - z); }, 0, X_.at(j + 1));
    return chain * std::exp(-z * t_);
  }

  cplx coupling(std::span<const cplx> w) const override { return b_factor(w, profile_.q_params()); }

 private:
  const StateVector& X_;
  double t_;
  const RateProfile& profile_;
};

struct BetheSum {
  cplx value{};
  double estimated_error = 0.0;
  double imag_leak = 0.0;  // largest |Im| among the Lambda terms
  int nodes_max = 0;
  bool converged = true;
  std::vector<QuadratureResult> per_permutation;
};

/// sum_sigma Lambda_Y(X;t;sigma) with the (-1/b_{x_k}) prefactor applied once
/// per permutation at assembly.
BetheSum bethe_sum(const StateVector& X, const StateVector& Y, double t,
                   const RateProfile& profile, const ContourSpec& spec,
                   bool time_derivative = false) {
  BetheSum out;
  const double prefactor = neg_inv_b_prefactor(X, profile);
  for_each_permutation(X.n(), [&](const Permutation& sigma) {
    const LambdaIntegrand integrand(X, Y, sigma, t, profile, time_derivative);
    QuadratureResult qr = contour_integral_n(integrand, spec);
    const cplx lambda = prefactor * qr.value;
    out.value += lambda;
    out.estimated_error += std::abs(prefactor) * qr.estimated_error;
    out.imag_leak = std::max(out.imag_leak, std::abs(lambda.imag()));
    out.nodes_max = std::max(out.nodes_max, qr.nodes_used);
    out.converged = out.converged && qr.converged;
    out.per_permutation.push_back(qr);
  });
  return out;
}

void require_same_n(const StateVector& X, const StateVector& Y) {
  if (X.n() != Y.n())
    throw std::invalid_argument("state dimension mismatch: |X| = " + std::to_string(X.n()) +
                                ", |Y| = " + std::to_string(Y.n()));
}

void require_nonnegative_time(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("t must be nonnegative");
}

ComplexResult u0_sum_with_spec(const StateVector& X, const StateVector& Y, double t,
                               const RateProfile& profile, const ContourSpec& spec) {
  BetheSum s = bethe_sum(X, Y, t, profile, spec);
  ComplexResult r;
  r.value = s.value;
  r.scale = std::max(1.0, std::abs(s.value));
  r.estimated_error = s.estimated_error;
  r.radius = spec.radius;
  r.nodes_max = s.nodes_max;
  r.converged = s.converged;
  return r;
}

}  // namespace

ProbabilityResult transition_probability(const TransitionRequest& req) {
  require_same_n(req.X, req.Y);
  require_nonnegative_time(req.t);
  if (!req.Y.ordered()) throw StateOrderError("transition_probability: Y must lie in W^n");
  if (!req.X.ordered()) throw StateOrderError("transition_probability: X must lie in W^n");

  const ContourSpec spec = req.contour.resolve(choose_radius(req.profile, req.Y, req.X));
  check_horizon(spec, req.t, req.contour);

  const double W = weight_W(req.X, req.profile.q_params());
  BetheSum s = bethe_sum(req.X, req.Y, req.t, req.profile, spec);

  ProbabilityResult res;
  res.p = s.value.real() / W;
  res.imag_leak = std::max(std::abs(s.value.imag()), s.imag_leak) / W;
  res.estimated_error = s.estimated_error / W;
  res.radius = spec.radius;
  res.nodes_max = s.nodes_max;
  res.converged = s.converged;
  res.per_permutation = std::move(s.per_permutation);
  return res;
}

double one_particle_prob(int y, int x, double t, const RateProfile& profile) {
  require_nonnegative_time(t);
  if (x < y) return 0.0;
  if (x == y) return std::exp(-profile.b(x) * t);

  std::vector<double> b;
  b.reserve(static_cast<std::size_t>(x - y + 1));
  for (int k = y; k <= x; ++k) b.push_back(profile.b(k));

  bool confluent = false;
  for (std::size_t i = 0; i < b.size() && !confluent; ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j)
      if (std::abs(b[i] - b[j]) < 1e-6 * std::max(b[i], b[j])) {
        confluent = true;
        break;
      }

  if (!confluent) {
    // Residue sum over the simple poles b_y..b_x.  The terms cancel heavily
    // when rates cluster, so track the condition alongside the sum and hand
    // badly conditioned ranges to the quadrature as well.
    long double pref = 1.0L;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) pref *= b[i];
    long double sum = 0.0L, sum_abs = 0.0L;
    for (std::size_t k = 0; k < b.size(); ++k) {
      long double denom = 1.0L;
      for (std::size_t j = 0; j < b.size(); ++j)
        if (j != k) denom *= static_cast<long double>(b[j]) - b[k];
      const long double term = std::exp(static_cast<long double>(-b[k] * t)) / denom;
      sum += term;
      sum_abs += std::abs(term);
    }
    const long double rounding_bound = pref * sum_abs * 1e-18L * static_cast<long double>(b.size());
    if (rounding_bound < 1e-10L) return static_cast<double>(pref * sum);
  }

  // Nearly coincident rates: quadrature realizes the l'Hopital limit.
  const StateVector Xs(std::vector<int>{x});
  const StateVector Ys(std::vector<int>{y});
  ContourSpec spec;
  spec.radius = choose_radius(profile, Ys, Xs);
  spec.nodes = 64;
  spec.max_nodes = 4096;
  spec.tol = 1e-12;
  const QuadratureResult qr = contour_integral_n(
      1,
      [&](std::span<const cplx> w) {
        return prod_prime([&](int k) { return profile.b(k) / (profile.b(k) - w[0]); }, y, x) *
               std::exp(-w[0] * t);
      },
      spec);
  return (-1.0 / profile.b(x)) * qr.value.real();
}

ProbabilityResult step_init_prob(const StateVector& X, double t, const RateProfile& profile,
                                 const ContourOptions& contour) {
  require_nonnegative_time(t);
  if (!X.ordered()) throw StateOrderError("step_init_prob: X must lie in W^n");
  const StateVector Y(std::vector<int>(static_cast<std::size_t>(X.n()), 0));

  const ContourSpec spec = contour.resolve(choose_radius(profile, Y, X));
  check_horizon(spec, t, contour);

  const QParams& q = profile.q_params();
  const double scalar =
      q_factorial(X.n(), q) / weight_W(X, q) * neg_inv_b_prefactor(X, profile);
  const QuadratureResult qr = contour_integral_n(StepIntegrand(X, t, profile), spec);
  const cplx value = scalar * qr.value;

  ProbabilityResult res;
  res.p = value.real();
  res.imag_leak = std::abs(value.imag());
  res.estimated_error = std::abs(scalar) * qr.estimated_error;
  res.radius = spec.radius;
  res.nodes_max = qr.nodes_used;
  res.converged = qr.converged;
  res.per_permutation = {qr};
  return res;
}

ComplexResult u0_sum(const StateVector& X, const StateVector& Y, double t,
                     const RateProfile& profile, const ContourOptions& contour) {
  require_same_n(X, Y);
  require_nonnegative_time(t);
  if (!Y.ordered()) throw StateOrderError("u0_sum: Y must lie in W^n");
  const ContourSpec spec = contour.resolve(choose_radius(profile, Y, X));
  check_horizon(spec, t, contour);
  return u0_sum_with_spec(X, Y, t, profile, spec);
}

ComplexResult free_evolution_residual(const StateVector& X, const StateVector& Y, double t,
                                      const RateProfile& profile, const ContourOptions& contour) {
  require_same_n(X, Y);
  require_nonnegative_time(t);
  if (!Y.ordered()) throw StateOrderError("free_evolution_residual: Y must lie in W^n");

  // One radius for every term so the compared integrals share their grids.
  const ContourSpec spec = contour.resolve(choose_radius(profile, Y, X));
  check_horizon(spec, t, contour);

  ComplexResult res;
  res.radius = spec.radius;
  res.converged = true;

  BetheSum ddt = bethe_sum(X, Y, t, profile, spec, /*time_derivative=*/true);
  cplx residual = ddt.value;
  double scale = std::max(1.0, std::abs(ddt.value));
  double err = ddt.estimated_error;
  res.nodes_max = ddt.nodes_max;
  res.converged = res.converged && ddt.converged;

  const ComplexResult uX = u0_sum_with_spec(X, Y, t, profile, spec);
  res.nodes_max = std::max(res.nodes_max, uX.nodes_max);
  res.converged = res.converged && uX.converged;
  for (int k = 1; k <= X.n(); ++k) {
    const ComplexResult uLow = u0_sum_with_spec(X.lowered(k), Y, t, profile, spec);
    res.nodes_max = std::max(res.nodes_max, uLow.nodes_max);
    res.converged = res.converged && uLow.converged;
    const cplx inflow = profile.b(X.at(k) - 1) * uLow.value;
    const cplx outflow = profile.b(X.at(k)) * uX.value;
    residual -= inflow - outflow;
    scale = std::max({scale, std::abs(inflow), std::abs(outflow)});
    err += profile.b(X.at(k) - 1) * uLow.estimated_error + profile.b(X.at(k)) * uX.estimated_error;
  }

  res.value = residual;
  res.scale = scale;
  res.estimated_error = err;
  return res;
}

ComplexResult boundary_residual(int k, int x, const StateVector& context, const StateVector& Y,
                                double t, const RateProfile& profile,
                                const ContourOptions& contour) {
  const int n = context.n();
  require_same_n(context, Y);
  require_nonnegative_time(t);
  if (k < 1 || k > n - 1)
    throw std::invalid_argument("boundary_residual: need 1 <= k <= n-1");
  if (!Y.ordered()) throw StateOrderError("boundary_residual: Y must lie in W^n");

  auto with_pair = [&](int a, int b) {
    std::vector<int> c = context.coords();
    c[static_cast<std::size_t>(k - 1)] = a;
    c[static_cast<std::size_t>(k)] = b;
    return StateVector::relaxed(std::move(c));
  };
  const StateVector X_asc = with_pair(x - 1, x);
  const StateVector X_desc = with_pair(x, x - 1);
  const StateVector X_stack = with_pair(x, x);

  const ContourSpec spec = contour.resolve(choose_radius(profile, Y, X_asc));
  check_horizon(spec, t, contour);

  const double q = profile.q();
  const ComplexResult u_asc = u0_sum_with_spec(X_asc, Y, t, profile, spec);
  const ComplexResult u_desc = u0_sum_with_spec(X_desc, Y, t, profile, spec);
  const ComplexResult u_stack = u0_sum_with_spec(X_stack, Y, t, profile, spec);

  const cplx t1 = profile.b(x - 1) * u_asc.value;
  const cplx t2 = q * profile.b(x - 1) * u_desc.value;
  const cplx t3 = (1.0 - q) * profile.b(x) * u_stack.value;

  ComplexResult res;
  res.value = t1 - t2 - t3;
  res.scale = std::max({1.0, std::abs(t1), std::abs(t2), std::abs(t3)});
  res.estimated_error = profile.b(x - 1) * u_asc.estimated_error +
                        q * profile.b(x - 1) * u_desc.estimated_error +
                        (1.0 - q) * profile.b(x) * u_stack.estimated_error;
  res.radius = spec.radius;
  res.nodes_max = std::max({u_asc.nodes_max, u_desc.nodes_max, u_stack.nodes_max});
  res.converged = u_asc.converged && u_desc.converged && u_stack.converged;
  return res;
}

}  // namespace qtazrp
