#include "qtazrp/bethe.hpp"

#include <algorithm>
#include <numeric>

namespace qtazrp {

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  const int n = static_cast<int>(images_.size());
  if (n == 0) throw std::invalid_argument("Permutation: empty image list");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int v : images_) {
    if (v < 1 || v > n || seen[static_cast<std::size_t>(v - 1)])
      throw std::invalid_argument("Permutation: images must be a bijection on {1..n}");
    seen[static_cast<std::size_t>(v - 1)] = true;
  }
  rebuild_cache();
}

Permutation Permutation::identity(int n) {
  std::vector<int> im(static_cast<std::size_t>(n));
  std::iota(im.begin(), im.end(), 1);
  return Permutation(std::move(im));
}

void Permutation::rebuild_cache() {
  const int n = this->n();
  inverse_.assign(static_cast<std::size_t>(n), 0);
  for (int i = 1; i <= n; ++i) inverse_[static_cast<std::size_t>(image(i) - 1)] = i;
  inversions_.clear();
  for (int alpha = 1; alpha <= n; ++alpha)
    for (int beta = alpha + 1; beta <= n; ++beta)
      if (preimage(alpha) > preimage(beta)) inversions_.emplace_back(beta, alpha);
}

bool Permutation::next() {
  const bool more = std::next_permutation(images_.begin(), images_.end());
  rebuild_cache();
  return more;
}

Permutation Permutation::swap_positions(int k) const {
  std::vector<int> im = images_;
  std::swap(im[static_cast<std::size_t>(k - 1)], im[static_cast<std::size_t>(k)]);
  return Permutation(std::move(im));
}

void for_each_permutation(int n, const std::function<void(const Permutation&)>& fn) {
  Permutation sigma = Permutation::identity(n);
  do {
    fn(sigma);
  } while (sigma.next());
}

cplx s_factor(int beta, int alpha, std::span<const cplx> w, const QParams& q) {
  const cplx wa = w[static_cast<std::size_t>(alpha - 1)];
  const cplx wb = w[static_cast<std::size_t>(beta - 1)];
  const cplx den = q.q() * wa - wb;
  const double scale = std::max(std::abs(q.q() * wa), std::abs(wb));
  if (vanishing(den, scale))
    throw PoleError("s_factor: q w_alpha - w_beta vanishes");
  return -(q.q() * wb - wa) / den;
}

cplx a_sigma(const Permutation& sigma, std::span<const cplx> w, const QParams& q) {
  cplx acc(1.0, 0.0);
  for (const auto& [beta, alpha] : sigma.inversions()) acc *= s_factor(beta, alpha, w, q);
  return acc;
}

cplx b_factor(std::span<const cplx> w, const QParams& q) {
  const int n = static_cast<int>(w.size());
  cplx acc(1.0, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const cplx den = w[static_cast<std::size_t>(i)] - q.q() * w[static_cast<std::size_t>(j)];
      const double scale =
          std::max(std::abs(w[static_cast<std::size_t>(i)]), std::abs(q.q() * w[static_cast<std::size_t>(j)]));
      if (vanishing(den, scale)) throw PoleError("b_factor: w_i - q w_j vanishes");
      acc *= (w[static_cast<std::size_t>(i)] - w[static_cast<std::size_t>(j)]) / den;
    }
  }
  return acc;
}

cplx lambda_integrand(const StateVector& X, const StateVector& Y, const Permutation& sigma,
                      double t, std::span<const cplx> w, const RateProfile& profile) {
  const int n = X.n();
  if (Y.n() != n || sigma.n() != n || static_cast<int>(w.size()) != n)
    throw std::invalid_argument("lambda_integrand: dimension mismatch");
  cplx acc = a_sigma(sigma, w, profile.q_params());
  for (int j = 1; j <= n; ++j) {
    const cplx wj = w[static_cast<std::size_t>(sigma.image(j) - 1)];
    acc *= prod_prime([&](int k) { return profile.b(k) / (profile.b(k) - wj); },
                      Y.at(sigma.image(j)), X.at(j));
    acc *= std::exp(-w[static_cast<std::size_t>(j - 1)] * t);
  }
  return acc;
}

cplx perm_sum_identity_residual(std::span<const cplx> w, const QParams& q) {
  const int n = static_cast<int>(w.size());
  cplx sum(0.0, 0.0);
  ComplexPoint permuted(static_cast<std::size_t>(n));
  for_each_permutation(n, [&](const Permutation& sigma) {
    for (int i = 1; i <= n; ++i)
      permuted[static_cast<std::size_t>(i - 1)] = w[static_cast<std::size_t>(sigma.preimage(i) - 1)];
    sum += a_sigma(sigma, permuted, q);
  });
  return sum - q_factorial(n, q) * b_factor(w, q);
}

cplx c_function(std::span<const cplx> w, const QParams& q) {
  const int n = static_cast<int>(w.size());
  cplx sum(0.0, 0.0);
  for (int k = 0; k < n; ++k) {
    cplx term(1.0, 0.0);
    for (int j = 0; j < n; ++j) {
      if (j == k) continue;
      const cplx den = w[static_cast<std::size_t>(j)] - w[static_cast<std::size_t>(k)];
      const double scale =
          std::max(std::abs(w[static_cast<std::size_t>(j)]), std::abs(w[static_cast<std::size_t>(k)]));
      if (vanishing(den, scale)) throw PoleError("c_function: coincident arguments");
      term *= (q.q() * w[static_cast<std::size_t>(j)] - w[static_cast<std::size_t>(k)]) / den;
    }
    sum += term;
  }
  return sum;
}

bool well_separated(std::span<const cplx> w, const QParams& q, double rel) {
  std::vector<cplx> pts(w.begin(), w.end());
  double wmax = 0.0;
  for (const cplx& v : w) {
    pts.push_back(q.q() * v);
    wmax = std::max(wmax, std::abs(v));
  }
  const double floor_dist = rel * wmax;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (std::abs(pts[i] - pts[j]) <= floor_dist) return false;
  return true;
}

}  // namespace qtazrp
