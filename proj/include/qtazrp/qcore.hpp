#ifndef QTAZRP_QCORE_HPP
#define QTAZRP_QCORE_HPP

#include <map>
#include <string>
#include <vector>

#include "qtazrp/common.hpp"

namespace qtazrp {

/// Deformation parameter, constrained to the open interval (0,1).
class QParams {
 public:
  explicit QParams(double q);
  double q() const { return q_; }

 private:
  double q_;
};

/// Site-dependent jump-rate scales on the whole lattice: a default conductance
/// plus finitely many per-site overrides.  b(i) = a(i)*(1-q) is the rescaling
/// every formula is written in.
class RateProfile {
 public:
  RateProfile(double default_a, QParams q, std::map<int, double> overrides = {});

  double a(int site) const;
  double b(int site) const { return a(site) * (1.0 - q_.q()); }
  double q() const { return q_.q(); }
  const QParams& q_params() const { return q_; }
  double default_a() const { return default_a_; }
  const std::map<int, double>& overrides() const { return overrides_; }

  /// Largest conductance anywhere on the lattice.
  double max_a() const;
  /// Largest b over the site window [lo, hi].
  double max_b_in(int lo, int hi) const;

  /// Parses {"q": 0.5, "default_a": 1.0, "overrides": {"-2": 2.0, "3": 0.5}}.
  /// Override keys are decimal integer strings.
  static RateProfile from_json_text(const std::string& text);
  std::string to_json_text() const;

 private:
  double default_a_;
  std::map<int, double> overrides_;
  QParams q_;
};

/// Particle positions.  Probability-facing APIs require membership in W^n
/// (weakly decreasing); residual checks on Z^n go through relaxed().
class StateVector {
 public:
  explicit StateVector(std::vector<int> coords);
  static StateVector relaxed(std::vector<int> coords);

  int n() const { return static_cast<int>(coords_.size()); }
  const std::vector<int>& coords() const { return coords_; }
  /// 1-based coordinate access, matching x_1 >= x_2 >= ... notation.
  int at(int k) const { return coords_[static_cast<std::size_t>(k) - 1]; }
  bool ordered() const { return ordered_; }
  int min_coord() const;
  int max_coord() const;
  /// X with coordinate k (1-based) decreased by one; relaxed in general.
  StateVector lowered(int k) const;

  bool operator==(const StateVector& o) const { return coords_ == o.coords_; }

 private:
  StateVector(std::vector<int> coords, bool check);
  std::vector<int> coords_;
  bool ordered_;
};

std::string to_string(const StateVector& X);

/// One maximal group of particles sharing a site.
struct Stack {
  int site;
  int height;
  bool operator==(const Stack& o) const { return site == o.site && height == o.height; }
};

/// Distinct sites with multiplicities, sites strictly decreasing, plus the
/// cumulative counts N_i.  Reconstructs the original state exactly.
struct StackDecomposition {
  std::vector<Stack> entries;
  std::vector<int> cumulative;
  StateVector reconstruct() const;
};

/// q-deformed factorial [k]_q! = (1-q)(1-q^2)...(1-q^k)/(1-q)^k, with [0]_q! = 1.
double q_factorial(int k, const QParams& q);

/// W(X) = prod over stacks of [height]_q!; the Bethe sum normalizer.
double weight_W(const StateVector& X, const QParams& q);

StackDecomposition stacks(const StateVector& X);

double rate_b(const RateProfile& profile, int site);

/// Extended product: ordinary product of f(k) for k in [lower, upper] when
/// upper >= lower, empty (1) when upper == lower-1, and the reciprocal
/// 1 / prod_{k=upper+1}^{lower-1} f(k) when upper < lower-1.
template <typename F>
cplx prod_prime(F&& f, int lower, int upper) {
  cplx acc(1.0, 0.0);
  if (upper >= lower) {
    for (int k = lower; k <= upper; ++k) acc *= f(k);
    return acc;
  }
  if (upper == lower - 1) return acc;
  for (int k = upper + 1; k <= lower - 1; ++k) {
    const cplx v = f(k);
    if (std::norm(v) < 1e-300) throw PoleError("prod_prime: zero factor in reciprocal branch at k=" + std::to_string(k));
    acc *= v;
  }
  return cplx(1.0, 0.0) / acc;
}

}  // namespace qtazrp

#endif
