#include "rairy/kernel.hpp"

#include <algorithm>
#include <boost/math/special_functions/airy.hpp>
#include <cmath>
#include <limits>

#include "rairy/genairy.hpp"

namespace rairy::kernel {

using contour::Contour;
using contour::Decay;
using contour::Label;

namespace {

constexpr double up = 2.0 * pi / 3.0;
constexpr double drop = 45.0;
const double sin60 = std::sqrt(3.0) / 2.0;

double log_abs(cplx z) {
  double a = std::abs(z);
  return a > 0 ? std::log(a) : -std::numeric_limits<double>::infinity();
}

// One factor of a Cauchy-type double integral, discretized on its own contour.
struct Sampled {
  std::vector<cplx> nodes;
  std::vector<cplx> fw;  // f(node) * weight
  double l1 = 0;
  double err = 0;
};

Sampled sample(const contour::Integrand& f, const Contour& c, double rel_tol, double max_panel) {
  contour::QuadOptions opt;
  opt.scale = 0.0;
  opt.relative_to_l1 = true;
  opt.max_panel_length = max_panel;
  contour::Discretization d = contour::discretize(f, c, rel_tol, opt);
  Sampled s;
  s.nodes = std::move(d.nodes);
  s.fw.resize(s.nodes.size());
  for (std::size_t k = 0; k < s.nodes.size(); ++k) {
    s.fw[k] = f(s.nodes[k]) * d.weights[k];
    s.l1 += std::abs(s.fw[k]);
  }
  s.err = d.error_estimate;
  return s;
}

struct Sum {
  cplx value;
  double err;
};

// sum_a sum_b T_a S_b / (t_a - s_b); the contours are at least `gap` apart.
Sum cauchy_sum(const Sampled& T, const Sampled& S, double gap) {
  const std::size_t ns = S.nodes.size();
  std::vector<double> sr(ns), si(ns), fr(ns), fi(ns);
  for (std::size_t b = 0; b < ns; ++b) {
    sr[b] = S.nodes[b].real();
    si[b] = S.nodes[b].imag();
    fr[b] = S.fw[b].real();
    fi[b] = S.fw[b].imag();
  }
  cplx total{};
  for (std::size_t a = 0; a < T.nodes.size(); ++a) {
    const double tr = T.nodes[a].real(), ti = T.nodes[a].imag();
    double accr = 0, acci = 0;
    for (std::size_t b = 0; b < ns; ++b) {
      double dr = tr - sr[b], di = ti - si[b];
      double inv = 1.0 / (dr * dr + di * di);
      // S_b * conj(d) / |d|^2
      accr += (fr[b] * dr + fi[b] * di) * inv;
      acci += (fi[b] * dr - fr[b] * di) * inv;
    }
    total += T.fw[a] * cplx{accr, acci};
  }
  double bound = T.l1 * S.l1 / gap;
  double err = (T.err * S.l1 + S.err * T.l1) / gap + 4.0 * std::numeric_limits<double>::epsilon() * bound;
  return {total, err};
}

double factor_tol(double tol) { return std::clamp(tol * 1e-3, 1e-14, 1e-8); }
double panel_for(double gap) { return std::clamp(2.0 * gap, 0.25, 2.0); }

// For negative zeta the saddles sit at +-i sqrt(-zeta); a vertical piece through them keeps the
// integrand O(1) instead of exponentially large on the rays. dir = -1 runs upward, +1 downward.
std::vector<cplx> through_saddles(double x, double zeta, double dir) {
  if (zeta >= 0.0) return {cplx{x, 0.0}};
  const double h = std::sqrt(-zeta);
  return {cplx{x, dir * h}, cplx{x, -dir * h}};
}

Contour left_path(Label label, double vertex, double zx, int r, double tau) {
  auto phi = [=](cplx t) {
    double v = (zx * t - t * t * t / 3.0).real();
    if (r > 0) v += r * log_abs(t + tau);
    return v;
  };
  return contour::open_polyline(label, -up, through_saddles(vertex, zx, -1.0), up, phi, drop,
                                Decay::Falling);
}

contour::Integrand t_factor(double zx, int r, double tau) {
  return [=](cplx t) { return pow_int(t + tau, r) * std::exp(zx * t - t * t * t / 3.0); };
}

contour::Integrand s_factor(double zy, int r, double tau) {
  return [=](cplx s) { return pow_int(s + tau, -r) * std::exp(s * s * s / 3.0 - zy * s); };
}

KernelValue to_value(cplx raw, double err) {
  return {raw.real(), err + std::abs(raw.imag())};
}

}  // namespace

void validate(const KernelParams& p) {
  if (p.r < 0) throw DomainError("kernel order r must be >= 0");
  if (!std::isfinite(p.tau)) throw DomainError("tau must be finite");
  if (!(p.tol > 1e-12 && p.tol < 1e-4)) throw DomainError("kernel tolerance must be in (1e-12, 1e-4)");
  if (!(p.contour_scale > 0) || !std::isfinite(p.contour_scale))
    throw DomainError("contour scale must be positive");
}

KernelContours kernel_contours(double zx, double zy, const KernelParams& p) {
  validate(p);
  const double tau = p.tau;
  const double rho = 0.5 * p.contour_scale, gap = 0.5 * p.contour_scale;
  // saddle positions of the two exponentials
  const double ps_star = std::sqrt(std::max(zy, 0.0)), pt_star = -std::sqrt(std::max(zx, 0.0));
  double ps = ps_star;
  bool loop = false;
  if (p.r > 0) {
    double left = std::min(ps_star, -tau - rho / sin60);  // pole inside the right wedge
    double right = std::max(ps_star, -tau + rho);         // pole outside, add the loop
    if (std::abs(right - ps_star) < std::abs(left - ps_star)) {
      ps = right;
      loop = true;
    } else {
      ps = left;
    }
  }
  const double ub = ps - gap;
  double pt = std::min(pt_star, ub);
  if (loop) {
    double lo = -tau - rho - gap, hi = -tau + (rho + gap) / sin60;
    if (pt > lo && pt < hi) pt = (hi <= ub && hi - pt < pt - lo) ? hi : lo;
  }
  auto sphi = [=, r = p.r](cplx s) {
    double v = (s * s * s / 3.0 - zy * s).real();
    if (r > 0) v -= r * log_abs(s + tau);
    return v;
  };
  KernelContours c{left_path(Label::Cmain, pt, zx, p.r, tau),
                   contour::open_polyline(Label::Ctilde, pi / 3.0, through_saddles(ps, zy, 1.0), -pi / 3.0, sphi,
                                          drop, Decay::Rising),
                   std::nullopt, gap};
  if (loop) c.s_loop = contour::make_dual_contour(3, tau, 1.0, rho);
  double d = contour::min_distance(c.t_path, c.s_path);
  if (c.s_loop) d = std::min(d, contour::min_distance(c.t_path, *c.s_loop));
  if (d < 0.99 * gap) throw contour::ContourIntersection("kernel contours closer than the gap");
  c.gap = d;
  return c;
}

KernelValue r_airy_kernel_on(double zx, double zy, const KernelParams& p, const KernelContours& c) {
  validate(p);
  if (contour::intersects(c.t_path, c.s_path) ||
      (c.s_loop && contour::intersects(c.t_path, *c.s_loop)))
    throw contour::ContourIntersection("kernel contours intersect");
  const double eps = factor_tol(p.tol), panel = panel_for(c.gap);
  Sampled T = sample(t_factor(zx, p.r, p.tau), c.t_path, eps, panel);
  Sampled S = sample(s_factor(zy, p.r, p.tau), c.s_path, eps, panel);
  Sum sum = cauchy_sum(T, S, c.gap);
  if (c.s_loop) {
    Sampled L = sample(s_factor(zy, p.r, p.tau), *c.s_loop, eps, panel);
    Sum extra = cauchy_sum(T, L, c.gap);
    sum.value += extra.value;
    sum.err += extra.err;
  }
  const double norm = 4.0 * pi * pi;
  // 1/(2 pi i)^2 = -1/(4 pi^2)
  return to_value(-sum.value / norm, sum.err / norm);
}

KernelValue r_airy_kernel(double zx, double zy, const KernelParams& p) {
  return r_airy_kernel_on(zx, zy, p, kernel_contours(zx, zy, p));
}

KernelValue kernel_diagonal(double z, const KernelParams& p) { return r_airy_kernel(z, z, p); }

double airy_kernel_classical(double x, double y) {
  using boost::math::airy_ai;
  using boost::math::airy_ai_prime;
  if (std::abs(x - y) < 1e-6) {
    double m = 0.5 * (x + y);
    double a = airy_ai(m), ap = airy_ai_prime(m);
    return ap * ap - m * a * a;
  }
  return (airy_ai(x) * airy_ai_prime(y) - airy_ai_prime(x) * airy_ai(y)) / (x - y);
}

KernelValue adler_kernel(double zx, double zy, const KernelParams& p, AdlerPairing pairing) {
  validate(p);
  const double tau = p.tau;
  const double rho = 0.5 * p.contour_scale, gap = 0.5 * p.contour_scale;
  const double u = pairing == AdlerPairing::Matched ? zy : zx;  // rides with a
  const double v = pairing == AdlerPairing::Matched ? zx : zy;  // rides with b
  // vertices -i h_a and +i h_b; h_a keeps -i tau above the a-contour
  double ps = std::sqrt(std::max(u, 0.0));
  if (p.r > 0) ps = std::min(ps, -tau - rho / sin60);
  const double pt = std::min(-std::sqrt(std::max(v, 0.0)), ps - gap);
  const cplx a_vertex{0.0, ps}, b_vertex{0.0, -pt};
  const int r = p.r;
  auto fa = [=](cplx a) {
    return pow_int(I * a - tau, -r) * std::exp(I * a * a * a / 3.0 + I * a * u);
  };
  auto fb = [=](cplx b) {
    return pow_int(-I * b - tau, r) * std::exp(I * b * b * b / 3.0 + I * b * v);
  };
  auto la = [&](cplx a) { return log_abs(fa(a)); };
  auto lb = [&](cplx b) { return log_abs(fb(b)); };
  const double in = 5.0 * pi / 6.0, out = pi / 6.0;
  Contour ca = contour::open_polyline(Label::Custom, in, {a_vertex}, out, la, drop, Decay::None);
  Contour cb = contour::open_polyline(Label::Custom, in, {b_vertex}, out, lb, drop, Decay::None);
  const double eps = factor_tol(p.tol), panel = panel_for(gap);
  Sampled A = sample(fa, ca, eps, panel);
  Sampled B = sample(fb, cb, eps, panel);
  // 1/(ia + ib) = -i / (a - (-b))
  for (auto& b : B.nodes) b = -b;
  const double d = ps - pt;
  Sum sum = cauchy_sum(A, B, d);
  const double norm = 4.0 * pi * pi;
  return to_value(I * sum.value / norm, sum.err / norm);
}

namespace {

void check_pair(int i, int j, int r) {
  if (i < 1 || i > 3 || j < 1 || j > 3) throw DomainError("contour indices must be in 1..3");
  if (r < 1) throw DomainError("the pairing needs r >= 1");
}

// C_j placed clear of the dual contours: C1 left of the circle, C2 above it.
Contour transfer_path(int j, double zx, int r, double tau) {
  auto phi = [=](cplx t) {
    double v = (zx * t - t * t * t / 3.0).real();
    if (r > 0) v += r * log_abs(t + tau);
    return v;
  };
  switch (j) {
    case 1: return left_path(Label::C1, -tau - 2.0, zx, r, tau);
    case 2:
      return contour::open_polyline(Label::C2, 0.0, {cplx{-tau, 2.0}}, up, phi, drop,
                                    Decay::Falling);
    default:
      return contour::half_polyline(Label::C3, {cplx{-tau, 0.0}}, up, phi, drop, Decay::Falling);
  }
}

Sum transfer_sum(int i, int j, double zx, double zy, int r, double tau, double tol) {
  Contour cs = genairy::dual_path(i, r, tau, 0, zy);
  Contour ct = transfer_path(j, zx, r, tau);
  double gap = contour::min_distance(cs, ct);
  if (gap < 0.25) throw contour::ContourIntersection("transfer contours too close");
  const double eps = factor_tol(tol), panel = panel_for(gap);
  Sampled T = sample(t_factor(zx, r, tau), ct, eps, panel);
  Sampled S = sample(s_factor(zy, r, tau), cs, eps, panel);
  return cauchy_sum(T, S, gap);
}

}  // namespace

cplx chi_transfer(int i, int j, double zx, double zy, int r, double tau, double tol) {
  check_pair(i, j, r);
  if (i == j) throw DomainError("the transfer double integral needs i != j");
  return (zx - zy) * transfer_sum(i, j, zx, zy, r, tau, tol).value / two_pi_i;
}

cplx chi_transfer_polynomial(int i, int j, double zx, double zy, int r, double tau, double tol) {
  check_pair(i, j, r);
  Contour cs = genairy::dual_path(i, r, tau, 0, zy);
  Contour ct = genairy::airy_path({j, r - 1, tau, 0}, zx);
  auto f = [=](cplx s, cplx t) {
    cplx poly = (t + s) * (t + tau) + s * s - zy;
    return poly * pow_int(t + tau, r - 1) * pow_int(s + tau, -r) *
           std::exp((s * s * s - t * t * t) / 3.0 + zx * t - zy * s);
  };
  contour::QuadOptions opt;
  opt.scale = 0.0;
  opt.relative_to_l1 = true;
  return contour::integrate_double(f, cs, ct, tol, false, opt).value / two_pi_i;
}

cplx concomitant(int i, int j, int r, double tau, cplx zeta, double tol) {
  check_pair(i, j, r);
  Contour cs = genairy::dual_path(i, r, tau, 0, zeta);
  Contour ct = genairy::airy_path({j, r - 1, tau, 0}, zeta);
  auto f = [=](cplx s, cplx t) {
    cplx poly = (t + s) * (t + tau) + s * s - zeta;
    return poly * pow_int(t + tau, r - 1) * pow_int(s + tau, -r) *
           std::exp((s * s * s - t * t * t) / 3.0 + zeta * (t - s));
  };
  contour::QuadOptions opt;
  opt.scale = 0.0;
  opt.relative_to_l1 = true;
  return contour::integrate_double(f, cs, ct, tol, false, opt).value / two_pi_i;
}

cplx chi_transfer_wronskian(int i, int j, double zx, double zy, int r, double tau, double tol) {
  check_pair(i, j, r);
  genairy::Matrix3c D = genairy::dual_wronskian(r - 1, zy, tau, tol);
  genairy::Matrix3c F = genairy::concomitant_matrix(zy, tau);
  genairy::Matrix3c X = genairy::wronskian_chi(r - 1, zx, tau, tol);
  return (D * F * X)(i - 1, j - 1);
}

KernelValue kernel_via_dual_contours(double zx, double zy, const KernelParams& p) {
  validate(p);
  Sum a = transfer_sum(2, 1, zx, zy, p.r, p.tau, p.tol);
  // no pole for r = 0, the circle contributes nothing
  Sum b = p.r > 0 ? transfer_sum(3, 1, zx, zy, p.r, p.tau, p.tol) : Sum{0.0, 0.0};
  const double norm = 4.0 * pi * pi;
  return to_value(-(a.value + b.value) / norm, (a.err + b.err) / norm);
}

}  // namespace rairy::kernel
