#ifndef QTAZRP_COMMON_HPP
#define QTAZRP_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace qtazrp {

using cplx = std::complex<double>;

/// A rational factor was evaluated at (or numerically on top of) one of its poles.
class PoleError : public std::runtime_error {
 public:
  explicit PoleError(const std::string& what) : std::runtime_error(what) {}
};

/// A state vector that must lie in the ordered cone W^n does not.
class StateOrderError : public std::invalid_argument {
 public:
  explicit StateOrderError(const std::string& what) : std::invalid_argument(what) {}
};

/// The requested time horizon exceeds what the contour evaluation can resolve
/// in double precision (R*t too large).  The master-equation oracle still works.
class HorizonError : public std::runtime_error {
 public:
  explicit HorizonError(const std::string& what) : std::runtime_error(what) {}
};

/// A truncated state space exceeded the enumeration cap.
class ResourceCapError : public std::runtime_error {
 public:
  explicit ResourceCapError(const std::string& what) : std::runtime_error(what) {}
};

/// Relative vanishing test for denominators: |den| < 1e-12 * scale, where
/// scale is the largest magnitude among the operands that formed den.
inline bool vanishing(const cplx& den, double scale) {
  const double s = scale > 1e-300 ? scale : 1e-300;
  return std::norm(den) < (1e-12 * s) * (1e-12 * s);
}

}  // namespace qtazrp

#endif
