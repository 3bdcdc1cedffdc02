#include "qtazrp/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "qtazrp/parallel.hpp"

namespace qtazrp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

/// One sweep over the full M-per-dimension grid.  Returns the quadrature sum
/// at M nodes and, extracted from the even-index sub-grid, the sum at M/2
/// nodes (coarse weights are 2x the fine ones per dimension).
struct GridSweep {
  const ProductIntegrand& f;
  int n;
  int M;
  std::vector<cplx> nodes;                       // z_m
  std::vector<std::vector<cplx>> weighted;       // [var][m] = factor(var, z_m) * z_m / M

  GridSweep(const ProductIntegrand& integrand, double radius, int m)
      : f(integrand), n(integrand.dim()), M(m) {
    nodes.resize(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) {
      const double theta = kTwoPi * i / M;
      nodes[static_cast<std::size_t>(i)] = radius * cplx(std::cos(theta), std::sin(theta));
    }
    weighted.assign(static_cast<std::size_t>(n), {});
    for (int j = 0; j < n; ++j) {
      auto& row = weighted[static_cast<std::size_t>(j)];
      row.resize(static_cast<std::size_t>(M));
      for (int i = 0; i < M; ++i)
        row[static_cast<std::size_t>(i)] =
            f.factor(j, nodes[static_cast<std::size_t>(i)]) * nodes[static_cast<std::size_t>(i)] /
            static_cast<double>(M);
    }
  }

  void descend(int depth, cplx prefix, bool even, std::vector<cplx>& w, cplx& acc,
               cplx& acc_coarse) const {
    const auto& row = weighted[static_cast<std::size_t>(depth)];
    if (depth == n - 1) {
      for (int m = 0; m < M; ++m) {
        w[static_cast<std::size_t>(depth)] = nodes[static_cast<std::size_t>(m)];
        const cplx term = prefix * row[static_cast<std::size_t>(m)] * f.coupling(w);
        acc += term;
        if (even && (m & 1) == 0) acc_coarse += term;
      }
    } else {
      for (int m = 0; m < M; ++m) {
        w[static_cast<std::size_t>(depth)] = nodes[static_cast<std::size_t>(m)];
        descend(depth + 1, prefix * row[static_cast<std::size_t>(m)], even && (m & 1) == 0, w, acc,
                acc_coarse);
      }
    }
  }

  /// (sum at M nodes/dim, sum at M/2 nodes/dim).
  std::pair<cplx, cplx> run() const {
    // Per-outer-node partials, reduced in index order: the result is
    // bit-identical for any thread count.
    std::vector<cplx> partial(static_cast<std::size_t>(M), cplx{});
    std::vector<cplx> partial_coarse(static_cast<std::size_t>(M), cplx{});
    parallel_for(M, [&](long m0) {
      std::vector<cplx> w(static_cast<std::size_t>(n));
      cplx acc{}, acc_coarse{};
      w[0] = nodes[static_cast<std::size_t>(m0)];
      if (n == 1) {
        const cplx term = weighted[0][static_cast<std::size_t>(m0)] * f.coupling(w);
        acc = term;
        if ((m0 & 1) == 0) acc_coarse = term;
      } else {
        descend(1, weighted[0][static_cast<std::size_t>(m0)], (m0 & 1) == 0, w, acc, acc_coarse);
      }
      partial[static_cast<std::size_t>(m0)] = acc;
      partial_coarse[static_cast<std::size_t>(m0)] = acc_coarse;
    });
    cplx full{}, coarse{};
    for (int m0 = 0; m0 < M; ++m0) {
      full += partial[static_cast<std::size_t>(m0)];
      coarse += partial_coarse[static_cast<std::size_t>(m0)];
    }
    return {full, coarse * std::pow(2.0, n)};
  }
};

}  // namespace

std::vector<std::pair<cplx, cplx>> circle_nodes(double radius, int nodes) {
  if (!(radius > 0.0)) throw std::invalid_argument("circle_nodes: radius must be positive");
  if (nodes < 2) throw std::invalid_argument("circle_nodes: need at least 2 nodes");
  std::vector<std::pair<cplx, cplx>> out;
  out.reserve(static_cast<std::size_t>(nodes));
  for (int m = 0; m < nodes; ++m) {
    const double theta = kTwoPi * m / nodes;
    const cplx z = radius * cplx(std::cos(theta), std::sin(theta));
    out.emplace_back(z, z / static_cast<double>(nodes));
  }
  return out;
}

QuadratureResult contour_integral_n(const ProductIntegrand& f, const ContourSpec& spec) {
  if (!(spec.radius > 0.0))
    throw std::invalid_argument("contour_integral_n: spec.radius must be positive");
  if (!power_of_two(spec.nodes) || spec.nodes < 8)
    throw std::invalid_argument("contour_integral_n: nodes must be a power of two >= 8");
  if (spec.max_nodes < spec.nodes)
    throw std::invalid_argument("contour_integral_n: max_nodes < nodes");
  if (!(spec.tol > 0.0)) throw std::invalid_argument("contour_integral_n: tol must be positive");

  int M = spec.nodes;
  QuadratureResult res;
  for (;;) {
    const auto [full, coarse] = GridSweep(f, spec.radius, M).run();
    res.value = full;
    res.estimated_error = std::abs(full - coarse);
    res.nodes_used = M;
    res.converged = res.estimated_error <= spec.tol * std::max(1.0, std::abs(full));
    if (res.converged || 2 * M > spec.max_nodes) return res;
    M *= 2;
  }
}

namespace {
class PlainIntegrand final : public ProductIntegrand {
 public:
  PlainIntegrand(int n, const std::function<cplx(std::span<const cplx>)>& f) : n_(n), f_(f) {}
  int dim() const override { return n_; }
  cplx coupling(std::span<const cplx> w) const override { return f_(w); }

 private:
  int n_;
  const std::function<cplx(std::span<const cplx>)>& f_;
};
}  // namespace

QuadratureResult contour_integral_n(int n, const std::function<cplx(std::span<const cplx>)>& f,
                                    const ContourSpec& spec) {
  return contour_integral_n(PlainIntegrand(n, f), spec);
}

double choose_radius(const RateProfile& profile, const StateVector& Y, const StateVector& X) {
  const int lo = std::min(Y.min_coord(), X.min_coord()) - 1;
  const int hi = std::max(Y.max_coord(), X.max_coord());
  return 2.0 * profile.max_b_in(lo, hi);
}

}  // namespace qtazrp
