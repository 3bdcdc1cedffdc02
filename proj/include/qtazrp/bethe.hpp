#ifndef QTAZRP_BETHE_HPP
#define QTAZRP_BETHE_HPP

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "qtazrp/common.hpp"
#include "qtazrp/qcore.hpp"

namespace qtazrp {

/// Element of S_n in one-line notation (images of 1..n), with the inverse and
/// the inversion list cached.  An inversion is a pair (beta, alpha) with
/// alpha < beta and sigma^{-1}(alpha) > sigma^{-1}(beta).
class Permutation {
 public:
  explicit Permutation(std::vector<int> images);
  static Permutation identity(int n);

  int n() const { return static_cast<int>(images_.size()); }
  /// sigma(i), 1-based.
  int image(int i) const { return images_[static_cast<std::size_t>(i) - 1]; }
  /// sigma^{-1}(i), 1-based.
  int preimage(int i) const { return inverse_[static_cast<std::size_t>(i) - 1]; }
  const std::vector<int>& images() const { return images_; }
  const std::vector<std::pair<int, int>>& inversions() const { return inversions_; }

  /// Advance to the lexicographic successor in place; false once past the
  /// last permutation (which resets to the identity).
  bool next();

  /// sigma composed with the adjacent transposition (k, k+1) on positions:
  /// swaps the images at slots k and k+1.
  Permutation swap_positions(int k) const;

  bool operator==(const Permutation& o) const { return images_ == o.images_; }

 private:
  void rebuild_cache();
  std::vector<int> images_;
  std::vector<int> inverse_;
  std::vector<std::pair<int, int>> inversions_;
};

/// Streams all n! permutations in lexicographic order without materializing
/// them; fn receives each Permutation by const reference.
void for_each_permutation(int n, const std::function<void(const Permutation&)>& fn);

/// Points (w_1, ..., w_n) where the Bethe coefficients are evaluated.
using ComplexPoint = std::vector<cplx>;

/// S_(beta,alpha) = -(q w_beta - w_alpha) / (q w_alpha - w_beta); alpha < beta,
/// both 1-based into w.
cplx s_factor(int beta, int alpha, std::span<const cplx> w, const QParams& q);

/// A_sigma = product of S-factors over the inversions of sigma; A_id = 1.
cplx a_sigma(const Permutation& sigma, std::span<const cplx> w, const QParams& q);

/// B(w) = prod_{i<j} (w_i - w_j) / (w_i - q w_j).
cplx b_factor(std::span<const cplx> w, const QParams& q);

/// The integrand of Lambda_Y(X;t;sigma) without the (-1/b_{x_k}) prefactor:
///   A_sigma(w) * prod_j [ prod'_{k=y_{sigma(j)}}^{x_j} b_k/(b_k - w_{sigma(j)}) * e^{-w_j t} ].
/// X may be relaxed (any Z^n); Y must have matching length.
cplx lambda_integrand(const StateVector& X, const StateVector& Y, const Permutation& sigma,
                      double t, std::span<const cplx> w, const RateProfile& profile);

/// sum_sigma A_sigma(w_{sigma^{-1}(1)}, ..., w_{sigma^{-1}(n)}) - [n]_q! B(w);
/// vanishes identically, so the return value is the numerical residual.
cplx perm_sum_identity_residual(std::span<const cplx> w, const QParams& q);

/// C(w) = sum_k prod_{j != k} (q w_j - w_k)/(w_j - w_k); equals (1-q^n)/(1-q).
cplx c_function(std::span<const cplx> w, const QParams& q);

/// True when the values {w_i} union {q w_j} keep a min pairwise distance of
/// rel * max|w_i|; conditions the rational identities above.
bool well_separated(std::span<const cplx> w, const QParams& q, double rel = 1e-3);

}  // namespace qtazrp

#endif
