#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rairy/common.hpp"

namespace rairy::equilibrium {

// Real polynomial, constant term first; even degree >= 2, positive leading coefficient.
class Potential {
 public:
  explicit Potential(std::vector<double> coefficients);
  static Potential parse(const std::string& text);  // "c0,c1,c2,..."

  const std::vector<double>& coefficients() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  cplx value(cplx z) const;
  cplx derivative(cplx z) const;
  double value(double x) const { return value(cplx{x, 0.0}).real(); }
  double derivative(double x) const { return derivative(cplx{x, 0.0}).real(); }

 private:
  std::vector<double> c_;
};

// Support is not a single interval with a square-root edge and strict inequality outside.
class NotOneCut : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class AmbiguousRegime : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class EquilibriumData {
 public:
  EquilibriumData(Potential V, double alpha, double beta, double mass, std::vector<double> q);

  const Potential& potential() const { return V_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double mass() const { return mass_; }
  double ell1() const { return ell1_; }

  // rho(x) = q(x) sqrt((x - alpha)(beta - x)) / (2 pi) on the support, 0 outside.
  double density(double x) const;
  double mass_above(double x) const;  // integral of rho over [x, beta]
  // g(z) = (1/mass) int log(z - s) rho(s) ds, z off the support (principal log).
  cplx g(cplx z) const;
  cplx g_prime(cplx z) const;
  // Re of -V + 2g + l1 on the real line; zero on the support.
  double P1(double x) const;
  // -q(x) R(x), the derivative of P1 off the support.
  double P1_prime(double x) const;
  double q(double x) const;

 private:
  Potential V_;
  double alpha_, beta_, mass_;
  std::vector<double> q_;  // polynomial part of V'(z)/R(z), constant term first
  double ell1_ = 0.0;
};

// Endpoints from the two moment conditions by damped Newton; mass 1 - kappa/2 for perturbed solves.
EquilibriumData solve_one_cut(const Potential& V, double mass = 1.0);

struct EffectivePotentials {
  const EquilibriumData* eq;
  double a;
  double ell3;
  double P1(double x) const;
  double P2(double x) const;
  double P3(double x) const;
};
EffectivePotentials effective_potentials(const EquilibriumData& eq, double a);

double critical_a(const EquilibriumData& eq);

struct C1Estimate {
  double value;
  double error;
};
// Ratio (-(3/4) P1(beta + h))^{2/3} / h.
double c1_ratio(const EquilibriumData& eq, double h);
// Richardson over h = 1e-2, 5e-3, 2.5e-3.
C1Estimate scaling_constant_c1(const EquilibriumData& eq);
// Independent route through the density edge coefficient rho(x) ~ D sqrt(beta - x).
C1Estimate c1_from_density(const EquilibriumData& eq);

// (1/2 pi i) oint V'(z) / ((z - beta) R(z)) dz on a circle of the given radius around the cut.
double beta_integral(const EquilibriumData& eq, double radius = 0.0);
// d beta / d kappa for the mass 1 - kappa/2 family: -2 / ((beta - alpha) I_beta).
double beta_dot(const EquilibriumData& eq, double radius = 0.0);
// The same contour integral with the normalization 1 / ((beta - alpha) I_beta).
double beta_dot_unnormalized(const EquilibriumData& eq, double radius = 0.0);
// Central difference of beta(kappa) with total mass 1 - kappa/2.
double beta_dot_finite_difference(const Potential& V, double kappa = 1e-3);

// zeta = (-(3n/4) P1(z))^{2/3} right of beta, continued as -((3 pi n/2) int_z^beta rho)^{2/3} inside.
double zeta_map(const EquilibriumData& eq, double z, int n);
// z = beta + (zeta + delta) / (c1 n^{2/3}), delta = c1 beta_dot kappa n^{2/3}.
double unscale(const EquilibriumData& eq, double zeta, int n, double kappa);
double drift(const EquilibriumData& eq, int n, double kappa);

enum class Regime { Subcritical, Critical, NearCritical, Supercritical, JumpingOutlier };
const char* regime_name(Regime r);

struct RegimeReport {
  Regime regime;
  double a_c;
  std::optional<double> tau;
  std::optional<double> a_star;
  std::optional<double> b_star;
};

inline constexpr double regime_band = 1e-9;
inline constexpr double near_critical_tau_max = 5.0;

RegimeReport classify_regime(const EquilibriumData& eq, double a, std::optional<int> n = {});

}  // namespace rairy::equilibrium
