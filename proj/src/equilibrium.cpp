#include "rairy/equilibrium.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "rairy/contour.hpp"

namespace rairy::equilibrium {

namespace {

constexpr int circle_nodes = 1024;
constexpr int theta_nodes = 256;

double horner(const std::vector<double>& c, double x) {
  double r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
  return r;
}

// sqrt(z - alpha) sqrt(z - beta), principal roots; ~ z at infinity.
cplx resolvent_root(cplx z, double alpha, double beta) {
  return std::sqrt(z - alpha) * std::sqrt(z - beta);
}

// (1/2 pi i) oint f(z) dz on the circle |z - centre| = radius, trapezoid rule.
template <class F>
cplx circle_integral(F&& f, double centre, double radius, int nodes = circle_nodes) {
  cplx sum{0.0, 0.0};
  for (int k = 0; k < nodes; ++k) {
    const double th = 2.0 * pi * (k + 0.5) / nodes;
    const cplx w = radius * std::polar(1.0, th);
    sum += f(centre + w) * w;  // dz = i w dtheta
  }
  return sum / static_cast<double>(nodes);
}

double default_radius(double alpha, double beta) {
  const double h = 0.5 * (beta - alpha);
  return 2.0 * h + 1.0;
}

// The two moment conditions and the polynomial part, for mass m.
std::array<double, 2> moments(const Potential& V, double alpha, double beta, double m) {
  const double c = 0.5 * (alpha + beta);
  const double rad = default_radius(alpha, beta);
  const cplx m0 = circle_integral(
      [&](cplx z) { return V.derivative(z) / resolvent_root(z, alpha, beta); }, c, rad);
  const cplx m1 = circle_integral(
      [&](cplx z) { return z * V.derivative(z) / resolvent_root(z, alpha, beta); }, c, rad);
  return {m0.real(), m1.real() - 2.0 * m};
}

std::vector<double> polynomial_part(const Potential& V, double alpha, double beta) {
  // q_k = (1/2 pi i) oint V'(z)/R(z) z^{-k-1} dz on a circle about 0 enclosing the cut
  const int deg = V.degree() - 2;
  const double rad = std::max(std::abs(alpha), std::abs(beta)) + 1.0;
  std::vector<double> q(deg + 1);
  for (int k = 0; k <= deg; ++k) {
    q[k] = circle_integral(
               [&](cplx z) {
                 return V.derivative(z) / resolvent_root(z, alpha, beta) * pow_int(z, -k - 1);
               },
               0.0, rad)
               .real();
  }
  return q;
}

double initial_half_width(const Potential& V, double m) {
  // leading term only: V ~ c x^d gives b = (2 m 2^d / (d c binom(d, d/2)))^{1/d}
  const int d = V.degree();
  const double c = V.coefficients().back();
  const double binom = std::exp(std::lgamma(d + 1.0) - 2.0 * std::lgamma(d / 2.0 + 1.0));
  return std::pow(2.0 * m * std::pow(2.0, d) / (d * c * binom), 1.0 / d);
}

// int_a^b f(x) dx with Gauss-Legendre, n_panels panels.
template <class F>
double gl_integral(F&& f, double a, double b, int n_panels = 4) {
  const auto& rule = contour::gauss_legendre(32);
  double sum = 0.0;
  const double len = (b - a) / n_panels;
  for (int p = 0; p < n_panels; ++p) {
    const double lo = a + p * len;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
      sum += rule.weights[k] * f(lo + 0.5 * len * (rule.nodes[k] + 1.0));
  }
  return 0.5 * len * sum;
}

double x_max(const EquilibriumData& eq, double a) {
  const auto& V = eq.potential();
  const double b = eq.beta();
  const double base = V.value(b) - a * b;
  double step = 0.5;
  double x = b;
  while (V.value(x) - a * x - base < 50.0) {
    x += step;
    step *= 1.25;
    if (x > b + 1e6) throw NumericalFailure("scan bound not found");
  }
  return x;
}

}  // namespace

Potential::Potential(std::vector<double> coefficients) : c_(std::move(coefficients)) {
  while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
  const int d = degree();
  if (d < 2 || d % 2 != 0) throw DomainError("potential must have even degree >= 2");
  if (!(c_.back() > 0.0)) throw DomainError("potential must have positive leading coefficient");
  for (double v : c_)
    if (!std::isfinite(v)) throw DomainError("potential coefficient not finite");
}

Potential Potential::parse(const std::string& text) {
  std::vector<double> c;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      c.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError("bad potential coefficient '" + item + "'");
    }
  }
  return Potential(std::move(c));
}

cplx Potential::value(cplx z) const {
  cplx r{0.0, 0.0};
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * z + *it;
  return r;
}

cplx Potential::derivative(cplx z) const {
  cplx r{0.0, 0.0};
  for (std::size_t k = c_.size() - 1; k >= 1; --k) r = r * z + static_cast<double>(k) * c_[k];
  return r;
}

EquilibriumData::EquilibriumData(Potential V, double alpha, double beta, double mass,
                                 std::vector<double> q)
    : V_(std::move(V)), alpha_(alpha), beta_(beta), mass_(mass), q_(std::move(q)) {
  // equality on the support fixes l1 = V(beta) - 2 g(beta); evaluate g just right of the edge
  const double x = beta_ + (beta_ - alpha_);
  ell1_ = P1(x) + V_.value(x) - 2.0 * g(cplx{x, 0.0}).real();
}

double EquilibriumData::q(double x) const { return horner(q_, x); }

double EquilibriumData::density(double x) const {
  if (x <= alpha_ || x >= beta_) return 0.0;
  return q(x) * std::sqrt((x - alpha_) * (beta_ - x)) / (2.0 * pi);
}

double EquilibriumData::mass_above(double x) const {
  if (x >= beta_) return 0.0;
  if (x <= alpha_) return mass_;
  // x = beta - u^2 absorbs the edge root
  const double U = std::sqrt(beta_ - x);
  return gl_integral(
      [&](double u) {
        const double s = beta_ - u * u;
        return q(s) * std::sqrt(s - alpha_) * u * 2.0 * u / (2.0 * pi);
      },
      0.0, U, 2);
}

cplx EquilibriumData::g(cplx z) const {
  const double c = 0.5 * (alpha_ + beta_), h = 0.5 * (beta_ - alpha_);
  if (z.imag() == 0.0 && z.real() > alpha_ && z.real() < beta_) {
    // on the cut: split at the log singularity, upper-side limit
    const double x = z.real();
    const double tx = std::acos(std::clamp((x - c) / h, -1.0, 1.0));
    boost::math::quadrature::tanh_sinh<double> ts;
    // |x - s| = 2h |sin((th + tx)/2) sin((th - tx)/2)|, th - tx taken from the endpoint complement
    auto term = [&](double th, double off) {
      const double s = c + h * std::cos(th), sn = std::sin(th);
      const double d = 2.0 * h * std::abs(std::sin(0.5 * (th + tx)) * std::sin(0.5 * off));
      return d > 0.0 ? std::log(d) * q(s) * h * h * sn * sn / (2.0 * pi) : 0.0;
    };
    double re = 0.0;
    if (tx > 0.0)
      re += ts.integrate([&](double th, double tc) { return term(th, tc > 0.0 ? tc : th - tx); },
                         0.0, tx);
    if (tx < pi)
      re += ts.integrate([&](double th, double tc) { return term(th, tc < 0.0 ? tc : th - tx); },
                         tx, pi);
    return cplx{re, pi * mass_above(x)} / mass_;
  }
  const auto& rule = contour::gauss_legendre(theta_nodes);
  cplx sum{0.0, 0.0};
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double th = 0.5 * pi * (rule.nodes[k] + 1.0);
    const double x = c + h * std::cos(th);
    const double sn = std::sin(th);
    sum += rule.weights[k] * std::log(z - x) * q(x) * h * h * sn * sn / (2.0 * pi);
  }
  return 0.5 * pi * sum / mass_;
}

cplx EquilibriumData::g_prime(cplx z) const {
  const double c = 0.5 * (alpha_ + beta_), h = 0.5 * (beta_ - alpha_);
  const auto& rule = contour::gauss_legendre(theta_nodes);
  cplx sum{0.0, 0.0};
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double th = 0.5 * pi * (rule.nodes[k] + 1.0);
    const double x = c + h * std::cos(th);
    const double sn = std::sin(th), sh = std::sin(0.5 * th);
    const cplx diff = (z - beta_) + 2.0 * h * sh * sh;  // z - x without cancellation
    sum += rule.weights[k] * q(x) * h * h * sn * sn / (2.0 * pi * diff);
  }
  return 0.5 * pi * sum / mass_;
}

double EquilibriumData::P1(double x) const {
  if (x > beta_) {
    const double U = std::sqrt(x - beta_);
    return -gl_integral(
        [&](double u) {
          const double s = beta_ + u * u;
          return q(s) * std::sqrt(s - alpha_) * 2.0 * u * u;
        },
        0.0, U);
  }
  if (x < alpha_) {
    const double U = std::sqrt(alpha_ - x);
    return -gl_integral(
        [&](double u) {
          const double s = alpha_ - u * u;
          return q(s) * std::sqrt(beta_ - s) * 2.0 * u * u;
        },
        0.0, U);
  }
  return 0.0;
}

double EquilibriumData::P1_prime(double x) const {
  if (x > beta_) return -q(x) * std::sqrt((x - alpha_) * (x - beta_));
  if (x < alpha_) return q(x) * std::sqrt((alpha_ - x) * (beta_ - x));
  return 0.0;
}

EquilibriumData solve_one_cut(const Potential& V, double mass) {
  if (!(mass > 0.0)) throw DomainError("mass must be positive");
  auto F = [&](const Eigen::Vector2d& v) {
    const auto m = moments(V, v[0], v[1], mass);
    return Eigen::Vector2d{m[0], m[1]};
  };
  // damped Newton; nullopt when the line search stalls away from a root
  auto newton = [&](Eigen::Vector2d x) -> std::optional<Eigen::Vector2d> {
    Eigen::Vector2d f = F(x);
    for (int it = 0; it < 100; ++it) {
      if (f.norm() < 1e-14) return x;
      Eigen::Matrix2d J;
      for (int j = 0; j < 2; ++j) {
        const double d = 1e-7 * std::max(1.0, std::abs(x[j]));
        Eigen::Vector2d xp = x, xm = x;
        xp[j] += d;
        xm[j] -= d;
        J.col(j) = (F(xp) - F(xm)) / (2.0 * d);
      }
      const Eigen::Vector2d step = J.fullPivLu().solve(-f);
      double lam = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 40; ++ls) {
        const Eigen::Vector2d xn = x + lam * step;
        if (xn[1] - xn[0] > 1e-8) {
          const Eigen::Vector2d fn = F(xn);
          if (fn.norm() < (1.0 - 1e-4 * lam) * f.norm() || fn.norm() < 1e-14) {
            x = xn;
            f = fn;
            accepted = true;
            break;
          }
        }
        lam *= 0.5;
      }
      if (!accepted) break;
    }
    if (f.norm() < 1e-11) return x;
    return std::nullopt;
  };
  // wells can trap the first start near a stationary point of the moment map; widen and retry
  const double b0 = initial_half_width(V, mass);
  std::optional<Eigen::Vector2d> root;
  for (double scale : {1.0, 2.0, 0.5, 4.0}) {
    root = newton(Eigen::Vector2d{-scale * b0, scale * b0});
    if (root) break;
  }
  if (!root) throw NumericalFailure("endpoint solve did not converge");
  const Eigen::Vector2d x = *root;

  const double alpha = x[0], beta = x[1];
  auto q = polynomial_part(V, alpha, beta);
  EquilibriumData eq(V, alpha, beta, mass, q);

  // a posteriori regularity: positive density including the edges, strict inequality outside
  for (int k = 0; k <= 400; ++k) {
    const double s = alpha + (beta - alpha) * k / 400.0;
    if (!(eq.q(s) > 1e-10)) throw NotOneCut("density not positive on the support");
  }
  const double width = beta - alpha;
  for (int k = 1; k <= 200; ++k) {
    const double d = 0.1 + 3.0 * width * k / 200.0;
    if (!(eq.P1(beta + d) < -1e-6) || !(eq.P1(alpha - d) < -1e-6))
      throw NotOneCut("variational inequality fails off the support");
  }
  return eq;
}

double EffectivePotentials::P1(double x) const { return eq->P1(x); }

double EffectivePotentials::P2(double x) const {
  // -V + a x + g + l1 - l3, with Re g = (V + P1 - l1)/2
  return -0.5 * eq->potential().value(x) + 0.5 * eq->P1(x) + a * x + 0.5 * eq->ell1() - ell3;
}

double EffectivePotentials::P3(double x) const {
  return a * x - 0.5 * (eq->potential().value(x) + eq->P1(x) - eq->ell1()) - ell3;
}

EffectivePotentials effective_potentials(const EquilibriumData& eq, double a) {
  const double gb = 0.5 * (eq.potential().value(eq.beta()) - eq.ell1());
  return {&eq, a, a * eq.beta() - gb};
}

double critical_a(const EquilibriumData& eq) { return 0.5 * eq.potential().derivative(eq.beta()); }

double c1_ratio(const EquilibriumData& eq, double h) {
  const double p = eq.P1(eq.beta() + h);
  return std::pow(-0.75 * p, 2.0 / 3.0) / h;
}

C1Estimate scaling_constant_c1(const EquilibriumData& eq) {
  const double h = 1e-2;
  const double q0 = c1_ratio(eq, h), q1 = c1_ratio(eq, h / 2), q2 = c1_ratio(eq, h / 4);
  const double r1 = 2.0 * q1 - q0, r2 = 2.0 * q2 - q1;
  const double value = (4.0 * r2 - r1) / 3.0;
  if (!(value > 0.0)) throw NumericalFailure("c1 not positive");
  return {value, std::abs(value - r2)};
}

C1Estimate c1_from_density(const EquilibriumData& eq) {
  // D = q(beta) sqrt(beta - alpha) / (2 pi); -P1 ~ (4/3) pi D h^{3/2}
  const double D = eq.q(eq.beta()) * std::sqrt(eq.beta() - eq.alpha()) / (2.0 * pi);
  const double value = std::pow(pi * D, 2.0 / 3.0);
  if (!(value > 0.0)) throw NumericalFailure("c1 not positive");
  return {value, 1e-14 * value};
}

double beta_integral(const EquilibriumData& eq, double radius) {
  const double a = eq.alpha(), b = eq.beta();
  if (radius <= 0.0) radius = default_radius(a, b);
  const cplx v = circle_integral(
      [&](cplx z) { return eq.potential().derivative(z) / ((z - b) * resolvent_root(z, a, b)); },
      0.5 * (a + b), radius, 4096);
  return v.real();
}

double beta_dot_unnormalized(const EquilibriumData& eq, double radius) {
  const double I = beta_integral(eq, radius);
  if (!(std::abs(I) > 0.0) || !std::isfinite(I)) throw NumericalFailure("beta integral vanishes");
  return 1.0 / ((eq.beta() - eq.alpha()) * I);
}

double beta_dot(const EquilibriumData& eq, double radius) {
  return -2.0 * beta_dot_unnormalized(eq, radius);
}

double beta_dot_finite_difference(const Potential& V, double kappa) {
  const double bp = solve_one_cut(V, 1.0 - 0.5 * kappa).beta();
  const double bm = solve_one_cut(V, 1.0 + 0.5 * kappa).beta();
  return (bp - bm) / (2.0 * kappa);
}

double zeta_map(const EquilibriumData& eq, double z, int n) {
  if (n < 1) throw DomainError("n must be positive");
  if (z >= eq.beta()) return std::pow(-0.75 * n * eq.P1(z), 2.0 / 3.0);
  if (z <= eq.alpha()) throw DomainError("zeta map is defined near the right edge only");
  return -std::pow(1.5 * pi * n * eq.mass_above(z), 2.0 / 3.0);
}

double drift(const EquilibriumData& eq, int n, double kappa) {
  const double c1 = c1_from_density(eq).value;
  return c1 * beta_dot(eq) * kappa * std::pow(static_cast<double>(n), 2.0 / 3.0);
}

double unscale(const EquilibriumData& eq, double zeta, int n, double kappa) {
  if (n < 1) throw DomainError("n must be positive");
  const double c1 = c1_from_density(eq).value;
  const double scale = c1 * std::pow(static_cast<double>(n), 2.0 / 3.0);
  return eq.beta() + (zeta + drift(eq, n, kappa)) / scale;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Critical: return "critical";
    case Regime::NearCritical: return "near_critical";
    case Regime::Supercritical: return "supercritical";
    case Regime::JumpingOutlier: return "jumping_outlier";
  }
  return "?";
}

RegimeReport classify_regime(const EquilibriumData& eq, double a, std::optional<int> n) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("a must be positive");
  const double a_c = critical_a(eq);
  const double b = eq.beta();
  const auto P = effective_potentials(eq, a);
  const bool at_critical = std::abs(a - a_c) <= regime_band * std::max(1.0, std::abs(a_c));

  RegimeReport rep{Regime::Critical, a_c, {}, {}, {}};
  if (n) {
    if (*n < 1) throw DomainError("n must be positive");
    rep.tau = std::cbrt(static_cast<double>(*n)) * (a - a_c) / c1_from_density(eq).value;
  }

  // b*: stationary point of P3 right of beta, i.e. g'(x) = a; g' decreases from a_c
  double bstar = b;
  if (a < a_c && !at_critical) {
    double lo = b, hi = b + 1.0;
    while (eq.g_prime(cplx{hi, 0.0}).real() > a) {
      hi = b + 2.0 * (hi - b);
      if (hi > b + 1e8) throw NumericalFailure("b* not bracketed");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (eq.g_prime(cplx{mid, 0.0}).real() > a ? lo : hi) = mid;
    }
    bstar = 0.5 * (lo + hi);
  }
  rep.b_star = bstar;

  const double ref = (a < a_c && !at_critical) ? P.P3(bstar) : 0.0;
  const double lo = std::max(b, bstar);
  const double hi = x_max(eq, a);
  const int N = 4000;
  std::vector<double> xs(N + 1), ps(N + 1);
  for (int k = 0; k <= N; ++k) {
    xs[k] = lo + (hi - lo) * k / N;
    ps[k] = P.P2(xs[k]);
  }
  // local maxima refined by golden section
  struct Peak {
    double x, v;
  };
  std::vector<Peak> peaks;
  for (int k = 0; k <= N; ++k) {
    const bool left_ok = k == 0 || ps[k] >= ps[k - 1];
    const bool right_ok = k == N || ps[k] >= ps[k + 1];
    if (!left_ok || !right_ok) continue;
    double l = xs[std::max(k - 1, 0)], r = xs[std::min(k + 1, N)];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 100 && r - l > 1e-13 * std::max(1.0, std::abs(r)); ++it) {
      const double m1 = r - gr * (r - l), m2 = l + gr * (r - l);
      (P.P2(m1) < P.P2(m2) ? l : r) = (P.P2(m1) < P.P2(m2) ? m1 : m2);
    }
    const double xm = 0.5 * (l + r);
    const double vm = P.P2(xm);
    peaks.push_back(vm > ps[k] ? Peak{xm, vm} : Peak{xs[k], ps[k]});
  }
  const auto best = std::max_element(peaks.begin(), peaks.end(),
                                     [](const Peak& u, const Peak& v) { return u.v < v.v; });
  const double M = best->v;

  if (M > ref + regime_band) {
    int count = 0;
    for (const auto& p : peaks)
      if (p.v >= M - regime_band) ++count;
    rep.regime = count > 1 ? Regime::JumpingOutlier : Regime::Supercritical;
    rep.a_star = best->x;
  } else {
    // every interior point must sit strictly below the reference
    double interior = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= N; ++k) interior = std::max(interior, ps[k]);
    const bool boundary_max = std::abs(best->x - lo) <= 1e-12 * std::max(1.0, std::abs(lo));
    if (at_critical) {
      if (!boundary_max || interior > ref + regime_band)
        throw AmbiguousRegime("critical test inconclusive within tolerance band");
      rep.regime = Regime::Critical;
    } else if (a < a_c) {
      if (!(M < ref - regime_band))
        throw AmbiguousRegime("subcritical test inconclusive within tolerance band");
      rep.regime = Regime::Subcritical;
    } else {
      throw AmbiguousRegime("supercritical test inconclusive within tolerance band");
    }
  }
  if (rep.tau && !at_critical && std::abs(*rep.tau) <= near_critical_tau_max)
    rep.regime = Regime::NearCritical;
  return rep;
}

}  // namespace rairy::equilibrium
