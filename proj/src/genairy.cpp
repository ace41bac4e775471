#include "rairy/genairy.hpp"

#include <algorithm>
#include <array>
#include <boost/math/special_functions/airy.hpp>
#include <cmath>
#include <limits>

namespace rairy::genairy {

using contour::Contour;
using contour::Decay;
using contour::Label;

namespace {

constexpr double up = 2.0 * pi / 3.0;
constexpr double decay_drop = 45.0;
constexpr double route_threshold = 4.0;

double safe_log_abs(cplx z) {
  double a = std::abs(z);
  return a > 0 ? std::log(a) : -std::numeric_limits<double>::infinity();
}

struct RayGeometry {
  bool from_infinity;
  double in_angle;
  double out_angle;
};

RayGeometry geometry(int m) {
  switch (m) {
    case 1: return {true, -up, up};
    case 2: return {true, 0.0, up};
    case 3: return {false, 0.0, up};
    case 4: return {false, 0.0, 0.0};
    case 5: return {false, 0.0, -up};
    case 6: return {true, 0.0, -up};
    default: throw DomainError("airy contour id must be in 1..6");
  }
}

Label airy_label(int m) {
  static constexpr std::array<Label, 6> labels{Label::C1, Label::C2, Label::C3,
                                               Label::C4, Label::C5, Label::C6};
  return labels.at(m - 1);
}

void validate(const GenAirySpec& s) {
  if (s.m < 1 || s.m > 6) throw DomainError("airy contour id must be in 1..6");
  if (s.r < 0) throw DomainError("order r must be >= 0");
  if (s.k < 0) throw DomainError("derivative order must be >= 0");
  if (!std::isfinite(s.tau)) throw DomainError("tau must be finite");
}

double path_peak(const Contour& c, const std::function<double(cplx)>& phi) {
  double peak = -std::numeric_limits<double>::infinity();
  for (const auto& seg : c.segments()) {
    int n = std::max(8, static_cast<int>(seg.length() * 6));
    for (int q = 0; q <= n; ++q) peak = std::max(peak, phi(seg.at(static_cast<double>(q) / n)));
  }
  return peak;
}

}  // namespace

const char* region_name(Region g) {
  switch (g) {
    case Region::I: return "I";
    case Region::II: return "II";
    case Region::III: return "III";
    case Region::IV: return "IV";
  }
  return "?";
}

Region region_of(cplx zeta) {
  double a = std::arg(zeta);
  if (a >= 0 && a < up) return Region::I;
  if (a >= up) return Region::II;
  if (a < -up) return Region::III;
  return Region::IV;
}

Contour airy_path(const GenAirySpec& spec, cplx zeta) {
  validate(spec);
  const double tau = spec.tau;
  auto phi = [&](cplx t) {
    double v = (zeta * t - t * t * t / 3.0).real();
    if (spec.r > 0) v += spec.r * safe_log_abs(t + tau);
    if (spec.k > 0) v += spec.k * safe_log_abs(t);
    return v;
  };
  const RayGeometry g = geometry(spec.m);
  const Label label = airy_label(spec.m);
  const cplx vertex{-tau, 0.0};
  auto build = [&](std::vector<cplx> w) {
    if (g.from_infinity)
      return contour::open_polyline(label, g.in_angle, w, g.out_angle, phi, decay_drop,
                                    Decay::Falling);
    w.insert(w.begin(), vertex);
    return contour::half_polyline(label, w, g.out_angle, phi, decay_drop, Decay::Falling);
  };
  std::vector<cplx> straight;
  if (g.from_infinity) straight.push_back(vertex);
  Contour best = build(straight);
  if (std::abs(zeta) <= route_threshold) return best;

  // Candidate routes through the saddles +-sqrt(zeta) along steepest-descent directions.
  double best_peak = path_peak(best, phi);
  std::vector<std::vector<cplx>> candidates;
  if (g.from_infinity) candidates.push_back({cplx{0.0, 0.0}});
  std::array<cplx, 2> saddles{std::sqrt(zeta), -std::sqrt(zeta)};
  std::array<cplx, 2> dirs;
  std::array<double, 2> widths;
  for (int q = 0; q < 2; ++q) {
    cplx f2 = -2.0 * saddles[q];
    dirs[q] = std::polar(1.0, (pi - std::arg(f2)) / 2.0);
    widths[q] = std::max(0.5, 2.0 / std::sqrt(std::abs(saddles[q])));
  }
  for (int q = 0; q < 2; ++q) {
    candidates.push_back({saddles[q]});
    for (double sgn : {1.0, -1.0})
      for (double hmul : {1.0, 2.0}) {
        cplx h = sgn * hmul * widths[q] * dirs[q];
        candidates.push_back({saddles[q] - h, saddles[q] + h});
      }
  }
  for (int first = 0; first < 2; ++first)
    for (double s1 : {1.0, -1.0})
      for (double s2 : {1.0, -1.0}) {
        int second = 1 - first;
        cplx h1 = s1 * widths[first] * dirs[first], h2 = s2 * widths[second] * dirs[second];
        candidates.push_back({saddles[first] - h1, saddles[first] + h1, saddles[second] - h2,
                              saddles[second] + h2});
      }
  for (auto& w : candidates) {
    Contour c = build(w);
    double p = path_peak(c, phi);
    if (p < best_peak - 1e-9) {
      best_peak = p;
      best = std::move(c);
    }
  }
  return best;
}

cplx gen_airy_on(const GenAirySpec& spec, cplx zeta, const Contour& c, double tol) {
  validate(spec);
  auto f = [&](cplx t) {
    cplx v = std::exp(zeta * t - t * t * t / 3.0);
    if (spec.r > 0) v *= pow_int(t + spec.tau, spec.r);
    if (spec.k > 0) v *= pow_int(t, spec.k);
    return v;
  };
  return contour::integrate(f, c, tol).value / two_pi_i;
}

cplx gen_airy(const GenAirySpec& spec, cplx zeta, double tol) {
  Contour c = airy_path(spec, zeta);
  auto f = [&](cplx t) {
    cplx v = std::exp(zeta * t - t * t * t / 3.0);
    if (spec.r > 0) v *= pow_int(t + spec.tau, spec.r);
    if (spec.k > 0) v *= pow_int(t, spec.k);
    return v;
  };
  contour::QuadOptions opt;
  opt.scale = 0.0;
  opt.relative_to_l1 = true;
  return contour::integrate(f, c, tol, opt).value / two_pi_i;
}

Contour dual_path(int i, int pole_order, double tau, int k, cplx zeta, double radius) {
  if (i < 1 || i > 3) throw DomainError("dual contour id must be in 1..3");
  if (i == 3) return contour::make_dual_contour(3, tau, 1.0 + std::abs(tau) + radius, radius);
  auto phi = [=](cplx s) {
    double v = (s * s * s / 3.0 - zeta * s).real();
    if (pole_order != 0) v -= pole_order * safe_log_abs(s + tau);
    if (k > 0) v += k * safe_log_abs(s);
    return v;
  };
  if (i == 1)
    return contour::open_polyline(Label::Chat1, -pi / 3.0, {cplx{-tau, -radius}}, pi, phi,
                                  decay_drop, Decay::Rising);
  return contour::open_polyline(Label::Chat2, pi / 3.0, {cplx{-tau + radius, 0.0}}, -pi / 3.0, phi,
                                decay_drop, Decay::Rising);
}

cplx dual_airy(int i, int pole_order, double tau, int k, cplx zeta, double tol, double radius) {
  Contour c = dual_path(i, pole_order, tau, k, zeta, radius);
  auto f = [&](cplx s) {
    cplx v = std::exp(s * s * s / 3.0 - zeta * s);
    if (pole_order != 0) v *= pow_int(s + tau, -pole_order);
    if (k > 0) v *= pow_int(s, k);
    return v;
  };
  contour::QuadOptions opt;
  opt.scale = 0.0;
  opt.relative_to_l1 = true;
  return contour::integrate(f, c, tol, opt).value;
}

cplx eta(int j, double tau, double tol) {
  if (j < 0) throw DomainError("eta index must be >= 0");
  struct Pair {
    int inner;
    double sign;
    double angle;
  };
  const std::array<Pair, 3> pairs{Pair{6, 1.0, -up}, Pair{2, -1.0, up}, Pair{1, 1.0, 0.0}};
  const cplx start{-tau, 0.0};
  cplx total{};
  for (const Pair& p : pairs) {
    const GenAirySpec inner{p.inner, 0, tau, 0};
    const cplx dir = std::polar(1.0, p.angle);
    auto g = [&](cplx t) { return gen_airy(inner, t, tol * 0.1) * std::exp(tau * t) * pow_int(t, j); };
    // walk out until the outer integrand has decayed
    double peak = -std::numeric_limits<double>::infinity(), prev = peak, len = 0;
    for (double rho = 0.5;; rho += 0.5) {
      double v = safe_log_abs(g(start + rho * dir));
      peak = std::max(peak, v);
      if (v < peak - 40.0 && v < prev) {
        len = rho;
        break;
      }
      if (rho > 80) throw NumericalFailure("eta outer integrand does not decay");
      prev = v;
    }
    Contour ray(Label::Custom, {contour::Segment::line(start, start + len * dir)});
    contour::QuadOptions opt;
    opt.scale = 0.0;
    opt.relative_to_l1 = true;
    opt.max_panel_length = 2.0;
    total += p.sign * contour::integrate(g, ray, tol, opt).value;
  }
  return total;
}

EtaTable eta_table(int M, double tau, double tol) {
  EtaTable t;
  t.tau = tau;
  for (int j = 0; j <= M; ++j) t.values.push_back(eta(j, tau, tol));
  return t;
}

cplx eta_real_axis(int j, double tau, double tol) {
  if (j < 0) throw DomainError("eta index must be >= 0");
  const cplx w = std::polar(1.0, up);
  const cplx wj = pow_int(w, j), wmj = pow_int(w, -j);
  auto f = [&](cplx u) {
    double x = u.real();
    double ai = boost::math::airy_ai(x);
    return ai * std::pow(x, j) * (wmj * std::exp(tau * x / w) + wj * std::exp(w * tau * x) +
                                  std::exp(tau * x));
  };
  // Ai(x) ~ e^{-2/3 x^{3/2}}; stop once that beats e^{|tau| x} by a wide margin
  double L = 4.0;
  while ((2.0 / 3.0) * std::pow(L, 1.5) - std::abs(tau) * L - j * std::log(L) < 60.0) L += 1.0;
  Contour seg(Label::Custom, {contour::Segment::line(0.0, L)});
  return contour::integrate(f, seg, tol).value;
}

Matrix3c star_factor(Region g) {
  Matrix3c L = Matrix3c::Identity();
  if (g == Region::II) L(1, 0) = -1.0;
  if (g == Region::III) L(1, 0) = 1.0;
  return L;
}

Matrix3c jump_matrix(int gamma) {
  Matrix3c J;
  switch (gamma) {
    case 1: J << 1, 1, 1, 0, 1, 0, 0, 0, 1; break;
    case 2: J << 1, 0, 0, -1, 1, -1, 0, 0, 1; break;
    case 3: J << 0, 1, 0, -1, 0, 0, 0, 0, 1; break;
    case 4: J << 1, 0, 0, 1, 1, -1, 0, 0, 1; break;
    default: throw DomainError("jump contour id must be in 1..4");
  }
  return J;
}

AiryMatrix airy_matrix(cplx zeta, int r, double tau, Region region, double tol) {
  if (r < 1) throw DomainError("airy_matrix needs r >= 1");
  std::array<int, 3> cols{1, 2, 3};
  switch (region) {
    case Region::I: cols = {1, 2, 3}; break;
    case Region::II: cols = {1, 2, 4}; break;
    case Region::III: cols = {1, 6, 4}; break;
    case Region::IV: cols = {1, 6, 5}; break;
  }
  Matrix3c A;
  for (int c = 0; c < 3; ++c) {
    A(0, c) = gen_airy({cols[c], r, tau, 0}, zeta, tol);
    A(1, c) = gen_airy({cols[c], r, tau, 1}, zeta, tol);
    A(2, c) = gen_airy({cols[c], r - 1, tau, 0}, zeta, tol);
  }
  return {A * star_factor(region), region, r, tau, zeta};
}

double check_jump(int gamma, cplx point, int r, double tau, double tol) {
  // direction of travel along Gamma_gamma; the + side is to its left
  cplx dir;
  Region plus, minus;
  switch (gamma) {
    case 1: dir = 1.0; plus = Region::I; minus = Region::IV; break;
    case 2: dir = std::polar(1.0, up); plus = Region::II; minus = Region::I; break;
    case 3: dir = 1.0; plus = Region::II; minus = Region::III; break;
    case 4: dir = std::polar(1.0, pi / 3.0); plus = Region::III; minus = Region::IV; break;
    default: throw DomainError("jump contour id must be in 1..4");
  }
  const Matrix3c J = jump_matrix(gamma);
  const cplx normal = I * dir;
  const double eps = std::max(1e-6, std::sqrt(tol)) * (1.0 + std::abs(point));
  auto residual = [&](double e) {
    Matrix3c Ap = airy_matrix(point + e * normal, r, tau, plus, tol).entries;
    Matrix3c Am = airy_matrix(point - e * normal, r, tau, minus, tol).entries;
    return Matrix3c(Ap - Am * J);
  };
  Matrix3c R = 2.0 * residual(eps / 2.0) - residual(eps);
  return R.cwiseAbs().rowwise().sum().maxCoeff();
}

namespace {

struct Series {
  cplx prefactor;
  std::vector<std::pair<cplx, double>> terms;  // coefficient, power of zeta
  double omitted;                              // decay exponent of the O-term, relative to terms[0]
};

Series series_for(int i, int j, int r, double tau, cplx zeta) {
  if (region_of(zeta) != Region::I || std::abs(std::arg(zeta)) >= pi / 3.0)
    throw DomainError("expansions are implemented for region I with |arg zeta| < pi/3");
  if (i < 1 || i > 3 || j < 1 || j > 3) throw DomainError("entry index out of range");
  if (r < 1) throw DomainError("expansions need r >= 1");
  const double rr = r, r2 = rr * rr, r4 = r2 * r2;
  const cplx s = std::sqrt(zeta);
  const cplx xi = 2.0 / 3.0 * s * s * s;
  const double sqpi = std::sqrt(pi);
  Series out;
  if (j == 1) {
    cplx P = (r % 2 == 0 ? 1.0 : -1.0) / (2.0 * sqpi) * pow_int(s - tau, r) * std::exp(-xi);
    if (i == 1) {
      out.prefactor = P;
      out.terms = {{1.0, -0.25},
                   {-r2 / 4 + rr / 2 - 5.0 / 48, -1.75},
                   {-r2 * tau / 2 + 3 * rr * tau / 4, -2.25},
                   {r4 / 32, -3.25}};
      out.omitted = 2.5;
    } else if (i == 2) {
      out.prefactor = P;
      out.terms = {{-1.0, 0.25},
                   {r2 / 4 - 7.0 / 48, -1.25},
                   {r2 * tau / 2 - rr * tau / 4, -1.75},
                   {-r4 / 32, -2.75}};
      out.omitted = 2.5;
    } else {
      out.prefactor = -P;
      out.terms = {{1.0, -0.75}, {tau, -1.25}, {tau * tau, -1.75}};
      out.omitted = 1.5;
    }
  } else if (j == 2) {
    cplx P = -1.0 / (2.0 * sqpi * I) * pow_int(s + tau, r) * std::exp(xi);
    out.prefactor = P;
    if (i == 1) {
      out.terms = {{1.0, -0.25},
                   {r2 / 4 - rr / 2 + 5.0 / 48, -1.75},
                   {-r2 * tau / 2 + 3 * rr * tau / 4, -2.25},
                   {r4 / 32, -3.25}};
      out.omitted = 2.5;
    } else if (i == 2) {
      out.terms = {{1.0, 0.25},
                   {r2 / 4 - 7.0 / 48, -1.25},
                   {-r2 * tau / 2 + rr * tau / 4, -1.75},
                   {r4 / 32, -2.75}};
      out.omitted = 2.5;
    } else {
      out.terms = {{1.0, -0.75}, {-tau, -1.25}, {tau * tau, -1.75}};
      out.omitted = 1.5;
    }
  } else {
    const cplx eta0 = eta_real_axis(0, tau);
    const cplx base = std::exp(-tau * zeta) * eta0 / two_pi_i * std::pow(zeta, -rr);
    if (i == 1) {
      out.prefactor = (r % 2 == 0 ? -1.0 : 1.0) * std::exp(log_factorial(r)) * base;
      out.terms = {{1.0, -1.0}};
    } else if (i == 2) {
      out.prefactor = (r % 2 == 0 ? -1.0 : 1.0) * std::exp(log_factorial(r)) * base;
      out.terms = {{-tau, -1.0}};
    } else {
      out.prefactor = (r % 2 == 0 ? 1.0 : -1.0) * std::exp(log_factorial(r - 1)) * base;
      out.terms = {{1.0, 0.0}};
    }
    out.omitted = 1.0;
  }
  return out;
}

}  // namespace

ExpansionInfo expansion_info(int i, int j, int r, double tau, cplx zeta, int n_terms) {
  Series s = series_for(i, j, r, tau, zeta);
  const int avail = static_cast<int>(s.terms.size());
  if (n_terms < 1 || n_terms > avail) throw DomainError("n_terms out of range for this entry");
  const double p0 = s.terms[0].second;
  double next = s.omitted;
  for (int q = n_terms; q < avail; ++q) next = std::min(next, p0 - s.terms[q].second);
  return {avail, next, s.prefactor * s.terms[0].first * std::pow(zeta, p0)};
}

cplx asymptotic_entry(int i, int j, int r, double tau, cplx zeta, int n_terms) {
  Series s = series_for(i, j, r, tau, zeta);
  if (n_terms < 1 || n_terms > static_cast<int>(s.terms.size()))
    throw DomainError("n_terms out of range for this entry");
  cplx sum{};
  for (int q = 0; q < n_terms; ++q) sum += s.terms[q].first * std::pow(zeta, s.terms[q].second);
  return s.prefactor * sum;
}

Matrix3c wronskian_chi(int r, cplx zeta, double tau, double tol) {
  if (r < 0) throw DomainError("order must be >= 0");
  Matrix3c X;
  for (int col = 0; col < 3; ++col)
    for (int row = 0; row < 3; ++row) X(row, col) = gen_airy({col + 1, r, tau, row}, zeta, tol);
  return X;
}

Matrix3c dual_wronskian(int r, cplx zeta, double tau, double tol) {
  if (r < 0) throw DomainError("order must be >= 0");
  Matrix3c X;
  for (int i = 0; i < 3; ++i)
    for (int m = 0; m < 3; ++m) X(i, m) = dual_airy(i + 1, r + 1, tau, m, zeta, tol);
  return X;
}

Matrix3c pairing_matrix(cplx zeta, double tau) {
  Matrix3c F;
  F << zeta, -tau, -1.0, -tau, -1.0, 0.0, -1.0, 0.0, 0.0;
  return F;
}

Matrix3c concomitant_matrix(cplx zeta, double tau) { return -pairing_matrix(zeta, tau); }

}  // namespace rairy::genairy
