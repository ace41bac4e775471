#pragma once

#include <functional>
#include <vector>

#include "rairy/common.hpp"

namespace rairy::contour {

enum class Label { C1, C2, C3, C4, C5, C6, Chat1, Chat2, Chat3, Cmain, Ctilde, Custom };

const char* label_name(Label l);

// Sign of the cubic in the exponential the contour is meant to carry.
// Falling: e^{-t^3/3}, ends need cos(3 theta) > 0. Rising: e^{+s^3/3}, ends need cos(3 theta) < 0.
enum class Decay { Falling, Rising, None };

class Segment {
 public:
  static Segment line(cplx from, cplx to);
  static Segment arc(cplx center, double radius, double theta_from, double theta_to);

  cplx at(double u) const;
  cplx deriv(double u) const;
  cplx start() const { return at(0.0); }
  cplx end() const { return at(1.0); }
  double length() const;
  Segment reversed() const;
  bool is_line() const { return kind_ == Kind::Line; }

 private:
  enum class Kind { Line, Arc };
  Kind kind_ = Kind::Line;
  cplx a_{}, b_{};
  double radius_ = 0, th0_ = 0, th1_ = 0;
};

class Contour {
 public:
  // end_angles: directions of the truncated unbounded ends (outward), used for the decay certificate.
  Contour(Label label, std::vector<Segment> segments, std::vector<double> end_angles = {},
          Decay decay = Decay::None);

  Label label() const { return label_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<double>& end_angles() const { return end_angles_; }
  Decay decay() const { return decay_; }
  cplx start() const { return segments_.front().start(); }
  cplx end() const { return segments_.back().end(); }
  bool closed() const;
  double length() const;
  Contour reversed() const;
  // Polyline approximation (per segment pieces) used by the intersection tests.
  std::vector<cplx> sample(int per_segment = 64) const;

 private:
  Label label_;
  std::vector<Segment> segments_;
  std::vector<double> end_angles_;
  Decay decay_;
};

bool decay_certified(const Contour& c);

// Contour C_m (m = 1..6) meeting at -tau, rays truncated where |t| = truncation_radius.
Contour make_airy_contour(int m, double tau, double truncation_radius);

// Dual contour Chat_i (i = 1..3). radius: distance of the bend from -tau (and the circle radius for i = 3).
Contour make_dual_contour(int i, double tau, double truncation_radius, double radius = 1.0);

// Length of a ray from origin in direction dir at which log_mag has fallen `drop` below its running
// maximum and keeps falling. Bounded by max_len.
double ray_length(const std::function<double(cplx)>& log_mag, cplx origin, cplx dir, double drop,
                  double max_len = 60.0);

// Polyline from infinity along in_angle to waypoints and out along out_angle, rays sized by ray_length.
Contour open_polyline(Label label, double in_angle, const std::vector<cplx>& waypoints,
                      double out_angle, const std::function<double(cplx)>& log_mag, double drop,
                      Decay decay);
// Same, starting at a finite point (waypoints.front()) instead of coming in from infinity.
Contour half_polyline(Label label, const std::vector<cplx>& waypoints, double out_angle,
                      const std::function<double(cplx)>& log_mag, double drop, Decay decay);

double min_distance(const Contour& a, const Contour& b);
bool intersects(const Contour& a, const Contour& b);

struct QuadratureResult {
  cplx value{};
  double error_estimate = 0.0;
  int panels_used = 0;
};

class QuadratureFailure : public NumericalFailure {
 public:
  QuadratureFailure(const std::string& what, QuadratureResult best)
      : NumericalFailure(what), best_(best) {}
  const QuadratureResult& best() const { return best_; }

 private:
  QuadratureResult best_;
};

class ContourIntersection : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

struct QuadOptions {
  double scale = 1.0;  // tolerance is tol * scale
  bool relative_to_l1 = false;  // tolerance is tol * max(scale, integral of |f||dt|)
  int max_panels = 40000;
  double max_panel_length = 1.0;
};

using Integrand = std::function<cplx(cplx)>;
using Integrand2 = std::function<cplx(cplx s, cplx t)>;

inline constexpr double tolerance_floor = 1e-14;

QuadratureResult integrate(const Integrand& f, const Contour& c, double tol,
                           const QuadOptions& opt = {});

// Nodes and complex weights (dt folded in) of the converged adaptive rule for f on c.
struct Discretization {
  std::vector<cplx> nodes;
  std::vector<cplx> weights;
  double error_estimate = 0.0;
};
Discretization discretize(const Integrand& f, const Contour& c, double tol,
                          const QuadOptions& opt = {});

// Outer integral over cs of the inner integral over ct, each to tol/2.
QuadratureResult integrate_double(const Integrand2& f, const Contour& cs, const Contour& ct,
                                  double tol, bool singular_diagonal = true,
                                  const QuadOptions& opt = {});

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes, weights;
};
const GaussRule& gauss_legendre(int n);

}  // namespace rairy::contour
