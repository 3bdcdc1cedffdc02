#ifndef QTAZRP_QUADRATURE_HPP
#define QTAZRP_QUADRATURE_HPP

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "qtazrp/common.hpp"
#include "qtazrp/qcore.hpp"

namespace qtazrp {

/// Common circle |z| = R for every contour, M equispaced nodes per circle.
/// M must be a power of two >= 8 so node-doubling reuses the grid structure.
struct ContourSpec {
  double radius = 0.0;
  int nodes = 64;
  int max_nodes = 1024;
  double tol = 1e-10;
};

struct QuadratureResult {
  cplx value{0.0, 0.0};
  double estimated_error = 0.0;  // |value(M) - value(M/2)| at the final M
  int nodes_used = 0;
  bool converged = false;
};

/// Nodes z_m = R e^{2 pi i m / M} with weights z_m / M, so that
/// sum_m weight_m f(z_m) approximates (2 pi i)^{-1} closed-contour-integral f dz.
std::vector<std::pair<cplx, cplx>> circle_nodes(double radius, int nodes);

/// Integrand in product form: a per-variable factor (tabulated once per node
/// set) times a coupling evaluated on the full tuple.  The split is what lets
/// the tensor sweep cache the expensive one-dimensional chains.
class ProductIntegrand {
 public:
  virtual ~ProductIntegrand() = default;
  virtual int dim() const = 0;
  virtual cplx factor(int /*j*/, cplx /*z*/) const { return {1.0, 0.0}; }
  virtual cplx coupling(std::span<const cplx> /*w*/) const { return {1.0, 0.0}; }
};

/// Tensor-product trapezoid rule over the torus |w_j| = R, doubling the node
/// count per dimension until the change falls below tol * max(1, |value|) or
/// nodes exceed max_nodes.  converged reports the outcome honestly; the value
/// at the final grid is always returned.
QuadratureResult contour_integral_n(const ProductIntegrand& f, const ContourSpec& spec);

/// Convenience wrapper: a plain n-variable integrand with no product structure.
QuadratureResult contour_integral_n(int n, const std::function<cplx(std::span<const cplx>)>& f,
                                    const ContourSpec& spec);

/// R = 2 * max{ b_k : k in [min(min Y, min X) - 1, max(max Y, max X)] }.
/// Puts every b_k pole and every q*w pole strictly inside the circles and
/// every w/q pole strictly outside.
double choose_radius(const RateProfile& profile, const StateVector& Y, const StateVector& X);

}  // namespace qtazrp

#endif
