#pragma once

#include <memory>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "rairy/common.hpp"

namespace rairy::mop {

struct MopParams {
  int n = 10;
  int r = 0;
  double a = 0.0;
  int digits = 60;  // working decimal precision
};

void validate(const MopParams& p);

class PrecisionInsufficient : public NumericalFailure {
 public:
  PrecisionInsufficient(const std::string& what, int suggested)
      : NumericalFailure(what), suggested_digits(suggested) {}
  int suggested_digits;
};

// Finite-n kernel of the Gaussian ensemble with source diag(a,..,a,0,..,0), V = x^2/2.
// Polynomial side: degree < n, orthonormal for e^{-n x^2/2}; dual side: multi-index (n-r, r) over
// the weights e^{-n x^2/2} and e^{-n(x^2/2 - a x)}. Balanced normalization
//   K_n(x, y) = e^{-n(V(x) - V(y))/2} sum_k P_k(x) Q_k(y).
// Construction is sequential; evaluation does not modify the object but uses the
// thread's default multiprecision setting, so evaluate from one thread at a time.
class BiorthogonalSystem {
 public:
  explicit BiorthogonalSystem(const MopParams& p);
  const MopParams& params() const;

  double kernel(double x, double y) const;
  std::string kernel_decimal(double x, double y) const;  // all working digits

  // max |<P_i, Q_j> - delta_ij| from the Gram factorization, in working precision.
  double biorthogonality_residual() const;
  // |int K_n(t, t) dt - n| and |int K_n(x, t) K_n(t, y) dt - K_n(x, y)|, trapezoid rule in
  // working precision (integrands are entire with Gaussian decay).
  double trace_error() const;
  double reproducing_error(double x, double y) const;
  // log10 of the digits consumed by cancellation and conditioning.
  double digits_lost() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

double mop_kernel_finite_n(const BiorthogonalSystem& sys, double x, double y);

struct ScalingRow {
  int n;
  double zeta_x, zeta_y;
  double K_finite;  // K_n / (c1 n^{2/3}) at the rescaled points
  double K_limit;
  double rel_err;
};

struct ScalingTable {
  std::vector<ScalingRow> rows;
  // least-squares slope of log rel_err vs log n, per grid point, in grid order
  std::vector<double> slopes;
  double mean_slope = 0.0;  // slope of the grid-averaged log error
};

// a = a_c + tau c1 n^{-1/3} with the kappa = 0 constants of V = x^2/2;
// points beta + (zeta + delta)/(c1 n^{2/3}), delta = c1 beta_dot (r/n) n^{2/3}.
ScalingTable verify_scaling_limit(const std::vector<int>& n_list, int r, double tau,
                                  const std::vector<std::pair<double, double>>& grid,
                                  int digits = 60, double kernel_tol = 1e-10);

double fit_slope(const std::vector<double>& log_x, const std::vector<double>& log_y);

void write_csv(std::ostream& os, const ScalingTable& t);

}  // namespace rairy::mop
