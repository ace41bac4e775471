#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rairy {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};
inline const cplx two_pi_i{0.0, 2.0 * std::numbers::pi};

// Bad arguments (invalid ids, orders, regions). CLI maps these to exit code 2.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A documented precondition does not hold (e.g. contours intersect).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation ran but could not reach the requested accuracy. Exit code 1.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// z^n by repeated multiplication; n may be negative.
inline cplx pow_int(cplx z, int n) {
  cplx r{1.0, 0.0};
  for (int q = 0; q < (n < 0 ? -n : n); ++q) r *= z;
  return n >= 0 ? r : 1.0 / r;
}

// log(n!) without overflow.
double log_factorial(int n);

}  // namespace rairy
