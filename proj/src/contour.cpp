#include "rairy/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <queue>

namespace rairy {

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

}  // namespace rairy

namespace rairy::contour {

const char* label_name(Label l) {
  switch (l) {
    case Label::C1: return "C1";
    case Label::C2: return "C2";
    case Label::C3: return "C3";
    case Label::C4: return "C4";
    case Label::C5: return "C5";
    case Label::C6: return "C6";
    case Label::Chat1: return "Chat1";
    case Label::Chat2: return "Chat2";
    case Label::Chat3: return "Chat3";
    case Label::Cmain: return "C";
    case Label::Ctilde: return "Ctilde";
    case Label::Custom: return "custom";
  }
  return "?";
}

Segment Segment::line(cplx from, cplx to) {
  Segment s;
  s.kind_ = Kind::Line;
  s.a_ = from;
  s.b_ = to;
  return s;
}

Segment Segment::arc(cplx center, double radius, double theta_from, double theta_to) {
  Segment s;
  s.kind_ = Kind::Arc;
  s.a_ = center;
  s.radius_ = radius;
  s.th0_ = theta_from;
  s.th1_ = theta_to;
  return s;
}

cplx Segment::at(double u) const {
  if (kind_ == Kind::Line) return a_ + u * (b_ - a_);
  return a_ + std::polar(radius_, th0_ + u * (th1_ - th0_));
}

cplx Segment::deriv(double u) const {
  if (kind_ == Kind::Line) return b_ - a_;
  double th = th0_ + u * (th1_ - th0_);
  return I * std::polar(radius_, th) * (th1_ - th0_);
}

double Segment::length() const {
  if (kind_ == Kind::Line) return std::abs(b_ - a_);
  return radius_ * std::abs(th1_ - th0_);
}

Segment Segment::reversed() const {
  if (kind_ == Kind::Line) return line(b_, a_);
  return arc(a_, radius_, th1_, th0_);
}

Contour::Contour(Label label, std::vector<Segment> segments, std::vector<double> end_angles,
                 Decay decay)
    : label_(label), segments_(std::move(segments)), end_angles_(std::move(end_angles)),
      decay_(decay) {
  if (segments_.empty()) throw PreconditionError("contour needs at least one segment");
  for (std::size_t k = 1; k < segments_.size(); ++k) {
    cplx e = segments_[k - 1].end(), s = segments_[k].start();
    if (std::abs(e - s) > 1e-12 * std::max(1.0, std::abs(e)))
      throw PreconditionError("contour segments do not join");
  }
}

bool Contour::closed() const {
  return std::abs(start() - end()) <= 1e-12 * std::max(1.0, std::abs(start()));
}

double Contour::length() const {
  double l = 0;
  for (const auto& s : segments_) l += s.length();
  return l;
}

Contour Contour::reversed() const {
  std::vector<Segment> r;
  r.reserve(segments_.size());
  for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) r.push_back(it->reversed());
  return Contour(label_, std::move(r), end_angles_, decay_);
}

std::vector<cplx> Contour::sample(int per_segment) const {
  std::vector<cplx> pts;
  for (const auto& s : segments_) {
    int m = s.is_line() ? 1 : per_segment;
    for (int k = 0; k < m; ++k) pts.push_back(s.at(static_cast<double>(k) / m));
  }
  pts.push_back(end());
  return pts;
}

bool decay_certified(const Contour& c) {
  for (double th : c.end_angles()) {
    double c3 = std::cos(3.0 * th);
    if (c.decay() == Decay::Falling && !(c3 > 0)) return false;
    if (c.decay() == Decay::Rising && !(c3 < 0)) return false;
  }
  return true;
}

namespace {

double ray_to_radius(double tau, double theta, double R) {
  double s = tau * std::sin(theta);
  double disc = R * R - s * s;
  if (disc <= 0) throw DomainError("truncation radius too small for tau");
  return tau * std::cos(theta) + std::sqrt(disc);
}

constexpr double up = 2.0 * pi / 3.0;

}  // namespace

Contour make_airy_contour(int m, double tau, double truncation_radius) {
  if (!(truncation_radius > 0)) throw DomainError("truncation radius must be positive");
  if (!std::isfinite(tau)) throw DomainError("tau must be finite");
  const cplx v{-tau, 0.0};
  auto end_at = [&](double th) {
    return v + std::polar(ray_to_radius(tau, th, truncation_radius), th);
  };
  auto out = [&](double th) { return Segment::line(v, end_at(th)); };
  auto in = [&](double th) { return Segment::line(end_at(th), v); };
  switch (m) {
    case 1: return Contour(Label::C1, {in(-up), out(up)}, {-up, up}, Decay::Falling);
    case 2: return Contour(Label::C2, {in(0.0), out(up)}, {0.0, up}, Decay::Falling);
    case 3: return Contour(Label::C3, {out(up)}, {up}, Decay::Falling);
    case 4: return Contour(Label::C4, {out(0.0)}, {0.0}, Decay::Falling);
    case 5: return Contour(Label::C5, {out(-up)}, {-up}, Decay::Falling);
    case 6: return Contour(Label::C6, {in(0.0), out(-up)}, {0.0, -up}, Decay::Falling);
    default: throw DomainError("airy contour id must be in 1..6");
  }
}

Contour make_dual_contour(int i, double tau, double truncation_radius, double radius) {
  if (!(truncation_radius > 0) || !(radius > 0)) throw DomainError("radii must be positive");
  const double R = truncation_radius;
  switch (i) {
    case 1: {
      // from infinity at -pi/3, bend below -tau, leave horizontally to the left
      cplx v{-tau, -radius};
      auto to_r = [&](double th) {
        double b = (std::conj(v) * std::polar(1.0, th)).real();
        double c = std::norm(v) - R * R;
        if (c >= 0) throw DomainError("truncation radius too small");
        return -b + std::sqrt(b * b - c);
      };
      double th_in = -pi / 3.0, th_out = pi;
      cplx e_in = v + std::polar(to_r(th_in), th_in), e_out = v + std::polar(to_r(th_out), th_out);
      return Contour(Label::Chat1, {Segment::line(e_in, v), Segment::line(v, e_out)},
                     {th_in, th_out}, Decay::Rising);
    }
    case 2: {
      cplx v{-tau + radius, 0.0};
      auto to_r = [&](double th) {
        double b = (std::conj(v) * std::polar(1.0, th)).real();
        double c = std::norm(v) - R * R;
        if (c >= 0) throw DomainError("truncation radius too small");
        return -b + std::sqrt(b * b - c);
      };
      double th = pi / 3.0;
      cplx e_in = v + std::polar(to_r(th), th), e_out = v + std::polar(to_r(-th), -th);
      return Contour(Label::Chat2, {Segment::line(e_in, v), Segment::line(v, e_out)}, {th, -th},
                     Decay::Rising);
    }
    case 3:
      return Contour(Label::Chat3, {Segment::arc(cplx{-tau, 0.0}, radius, -pi, pi)}, {},
                     Decay::Rising);
    default: throw DomainError("dual contour id must be in 1..3");
  }
}

double ray_length(const std::function<double(cplx)>& log_mag, cplx origin, cplx dir, double drop,
                  double max_len) {
  dir /= std::abs(dir);
  double peak = log_mag(origin);
  double prev = peak;
  const double step = 0.25;
  auto below = [&](double rho) {
    double v = log_mag(origin + rho * dir);
    return std::isfinite(v) ? v < peak - drop : false;
  };
  for (double rho = step; rho <= max_len; rho += step) {
    double v = log_mag(origin + rho * dir);
    if (!std::isfinite(v)) continue;  // zero of a polynomial factor, not decay
    if (!std::isfinite(peak) || v > peak) peak = v;
    // the drop has to persist further out, not just dip at a zero
    if (v < peak - drop && v < prev && below(rho + 0.5) && below(rho + 1.0) && below(rho + 2.0))
      return rho;
    prev = v;
  }
  return max_len;
}

Contour open_polyline(Label label, double in_angle, const std::vector<cplx>& waypoints,
                      double out_angle, const std::function<double(cplx)>& log_mag, double drop,
                      Decay decay) {
  std::vector<Segment> segs;
  cplx first = waypoints.front(), last = waypoints.back();
  cplx din = std::polar(1.0, in_angle), dout = std::polar(1.0, out_angle);
  segs.push_back(Segment::line(first + ray_length(log_mag, first, din, drop) * din, first));
  for (std::size_t k = 1; k < waypoints.size(); ++k)
    segs.push_back(Segment::line(waypoints[k - 1], waypoints[k]));
  segs.push_back(Segment::line(last, last + ray_length(log_mag, last, dout, drop) * dout));
  return Contour(label, std::move(segs), {in_angle, out_angle}, decay);
}

Contour half_polyline(Label label, const std::vector<cplx>& waypoints, double out_angle,
                      const std::function<double(cplx)>& log_mag, double drop, Decay decay) {
  std::vector<Segment> segs;
  for (std::size_t k = 1; k < waypoints.size(); ++k)
    segs.push_back(Segment::line(waypoints[k - 1], waypoints[k]));
  cplx last = waypoints.back(), dout = std::polar(1.0, out_angle);
  segs.push_back(Segment::line(last, last + ray_length(log_mag, last, dout, drop) * dout));
  return Contour(label, std::move(segs), {out_angle}, decay);
}

namespace {

double point_segment_distance(cplx p, cplx a, cplx b) {
  cplx d = b - a;
  double len2 = std::norm(d);
  double u = len2 > 0 ? std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0) : 0.0;
  return std::abs(p - (a + u * d));
}

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool segments_cross(cplx p1, cplx p2, cplx q1, cplx q2) {
  double d1 = cross(q2 - q1, p1 - q1), d2 = cross(q2 - q1, p2 - q1);
  double d3 = cross(p2 - p1, q1 - p1), d4 = cross(p2 - p1, q2 - p1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

}  // namespace

double min_distance(const Contour& a, const Contour& b) {
  auto pa = a.sample(), pb = b.sample();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pa.size(); ++i)
    for (std::size_t j = 0; j + 1 < pb.size(); ++j) {
      if (segments_cross(pa[i], pa[i + 1], pb[j], pb[j + 1])) return 0.0;
      best = std::min({best, point_segment_distance(pa[i], pb[j], pb[j + 1]),
                       point_segment_distance(pa[i + 1], pb[j], pb[j + 1]),
                       point_segment_distance(pb[j], pa[i], pa[i + 1]),
                       point_segment_distance(pb[j + 1], pa[i], pa[i + 1])});
    }
  return best;
}

bool intersects(const Contour& a, const Contour& b) { return min_distance(a, b) < 1e-9; }

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw DomainError("gauss rule needs n >= 1");
  GaussRule g;
  g.nodes.resize(n);
  g.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.nodes[i] = -x;
    g.nodes[n - 1 - i] = x;
    g.weights[i] = g.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) g.nodes[n / 2] = 0.0;
  return cache.emplace(n, std::move(g)).first->second;
}

namespace {

constexpr int panel_nodes = 16;

struct RuleValue {
  cplx value;
  double l1;  // same rule applied to |f||dt|
};

RuleValue panel_rule(const Integrand& f, const Segment& s, double u0, double u1) {
  const GaussRule& g = gauss_legendre(panel_nodes);
  double half = 0.5 * (u1 - u0), mid = 0.5 * (u1 + u0);
  cplx acc{};
  double l1 = 0;
  for (int k = 0; k < panel_nodes; ++k) {
    double u = mid + half * g.nodes[k];
    cplx v = f(s.at(u)) * s.deriv(u);
    acc += g.weights[k] * v;
    l1 += g.weights[k] * std::abs(v);
  }
  return {acc * half, l1 * half};
}

struct Panel {
  std::size_t seg;
  double u0, u1;
  RuleValue left, right;  // rule on each half
  double err;
  cplx value() const { return left.value + right.value; }
  double l1() const { return left.l1 + right.l1; }
  bool operator<(const Panel& o) const { return err < o.err; }
};

}  // namespace

namespace {

struct Refined {
  std::vector<Panel> panels;  // smallest contributions first
  QuadratureResult result;
};

Refined refine(const Integrand& f, const Contour& c, double tol, const QuadOptions& opt) {
  if (!(tol > 0)) throw DomainError("tolerance must be positive");
  tol = std::max(tol, tolerance_floor);
  std::priority_queue<Panel> queue;
  auto make = [&](std::size_t seg, double u0, double u1, cplx whole) {
    const Segment& s = c.segments()[seg];
    double um = 0.5 * (u0 + u1);
    Panel p{seg, u0, u1, panel_rule(f, s, u0, um), panel_rule(f, s, um, u1), 0.0};
    p.err = std::abs(p.value() - whole);
    if (!std::isfinite(p.err)) p.err = std::numeric_limits<double>::infinity();
    return p;
  };
  double err_sum = 0, l1_sum = 0;
  for (std::size_t k = 0; k < c.segments().size(); ++k) {
    const Segment& s = c.segments()[k];
    int pieces = std::max(1, static_cast<int>(std::ceil(s.length() / opt.max_panel_length)));
    for (int j = 0; j < pieces; ++j) {
      double u0 = static_cast<double>(j) / pieces, u1 = static_cast<double>(j + 1) / pieces;
      Panel p = make(k, u0, u1, panel_rule(f, s, u0, u1).value);
      err_sum += p.err;
      l1_sum += p.l1();
      queue.push(p);
    }
  }
  auto total = [&]() {
    Refined out;
    auto copy = queue;
    while (!copy.empty()) {
      out.panels.push_back(copy.top());
      copy.pop();
    }
    std::reverse(out.panels.begin(), out.panels.end());
    for (const Panel& p : out.panels) {
      out.result.value += p.value();
      out.result.error_estimate += p.err;
    }
    out.result.panels_used = static_cast<int>(out.panels.size());
    return out;
  };
  auto target = [&]() { return tol * (opt.relative_to_l1 ? std::max(opt.scale, l1_sum) : opt.scale); };
  while (err_sum > target()) {
    if (static_cast<int>(queue.size()) >= opt.max_panels)
      throw QuadratureFailure("quadrature did not converge", total().result);
    Panel p = queue.top();
    queue.pop();
    if (p.u1 - p.u0 < 1e-13) {
      queue.push(p);
      throw QuadratureFailure("quadrature panel underflow", total().result);
    }
    double um = 0.5 * (p.u0 + p.u1);
    Panel a = make(p.seg, p.u0, um, p.left.value), b = make(p.seg, um, p.u1, p.right.value);
    err_sum += a.err + b.err - p.err;
    l1_sum += a.l1() + b.l1() - p.l1();
    queue.push(a);
    queue.push(b);
    if (err_sum <= target()) err_sum = total().result.error_estimate;  // shed drift in the running sum
  }
  Refined out = total();
  if (opt.relative_to_l1) out.result.error_estimate = std::min(out.result.error_estimate, target());
  return out;
}

}  // namespace

QuadratureResult integrate(const Integrand& f, const Contour& c, double tol,
                           const QuadOptions& opt) {
  return refine(f, c, tol, opt).result;
}

Discretization discretize(const Integrand& f, const Contour& c, double tol,
                          const QuadOptions& opt) {
  Refined r = refine(f, c, tol, opt);
  const GaussRule& g = gauss_legendre(panel_nodes);
  Discretization d;
  d.error_estimate = r.result.error_estimate;
  for (const Panel& p : r.panels) {
    const Segment& s = c.segments()[p.seg];
    double um = 0.5 * (p.u0 + p.u1);
    for (auto [a, b] : {std::pair{p.u0, um}, std::pair{um, p.u1}}) {
      double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      for (int k = 0; k < panel_nodes; ++k) {
        double u = mid + half * g.nodes[k];
        d.nodes.push_back(s.at(u));
        d.weights.push_back(g.weights[k] * half * s.deriv(u));
      }
    }
  }
  return d;
}

QuadratureResult integrate_double(const Integrand2& f, const Contour& cs, const Contour& ct,
                                  double tol, bool singular_diagonal, const QuadOptions& opt) {
  if (singular_diagonal && intersects(cs, ct))
    throw ContourIntersection("contours intersect while the integrand is singular on s = t");
  double inner_err_max = 0;
  auto outer = [&](cplx s) {
    auto r = integrate([&](cplx t) { return f(s, t); }, ct, tol / 2, opt);
    inner_err_max = std::max(inner_err_max, r.error_estimate);
    return r.value;
  };
  QuadratureResult r = integrate(outer, cs, tol / 2, opt);
  r.error_estimate += inner_err_max;
  return r;
}

}  // namespace rairy::contour
