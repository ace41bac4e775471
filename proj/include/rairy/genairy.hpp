#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rairy/common.hpp"
#include "rairy/contour.hpp"

namespace rairy::genairy {

using Matrix3c = Eigen::Matrix3cd;

// Which of the six ray contours, the power of (t + tau), and how many zeta-derivatives.
struct GenAirySpec {
  int m = 1;
  int r = 0;
  double tau = 0.0;
  int k = 0;
};

enum class Region { I, II, III, IV };
const char* region_name(Region g);
// Sector of zeta around the origin: I = (0, 2pi/3), II = (2pi/3, pi), III = (-pi, -2pi/3), IV = (-2pi/3, 0).
Region region_of(cplx zeta);

struct AiryMatrix {
  Matrix3c entries;
  Region region;
  int r;
  double tau;
  cplx zeta;
};

struct EtaTable {
  double tau = 0.0;
  std::vector<cplx> values;  // eta_0 .. eta_M
  int M() const { return static_cast<int>(values.size()) - 1; }
};

// Contour used by gen_airy: straight rays from -tau for small |zeta|, saddle-routed otherwise.
contour::Contour airy_path(const GenAirySpec& spec, cplx zeta);

// (1/2 pi i) int_{C_m} (t + tau)^r t^k e^{zeta t - t^3/3} dt; tol is relative to the peak of the integrand.
cplx gen_airy(const GenAirySpec& spec, cplx zeta, double tol = 1e-12);
// Same integrand over a caller-supplied contour, absolute tolerance.
cplx gen_airy_on(const GenAirySpec& spec, cplx zeta, const contour::Contour& c, double tol);

// int_{Chat_i} (s + tau)^{-pole_order} s^k e^{s^3/3 - zeta s} ds (no 1/2 pi i).
cplx dual_airy(int i, int pole_order, double tau, int k, cplx zeta, double tol = 1e-12,
               double radius = 1.0);
contour::Contour dual_path(int i, int pole_order, double tau, int k, cplx zeta, double radius = 1.0);

// Sum over the three ray pairs of int Ai_{C_A}(t) e^{tau t} t^j dt, inner functions by gen_airy.
cplx eta(int j, double tau, double tol = 1e-11);
EtaTable eta_table(int M, double tau, double tol = 1e-11);
// Real-axis form int_0^inf Ai(u) u^j (w^-j e^{tau u / w} + w^j e^{w tau u} + e^{tau u}) du, w = e^{2 pi i/3}.
cplx eta_real_axis(int j, double tau, double tol = 1e-13);

Matrix3c star_factor(Region g);
Matrix3c jump_matrix(int gamma);
AiryMatrix airy_matrix(cplx zeta, int r, double tau, Region region, double tol = 1e-12);
// Max-row-sum norm of A_+ - A_- J on Gamma_gamma at point (Richardson over two offsets).
double check_jump(int gamma, cplx point, int r, double tau, double tol = 1e-12);

struct ExpansionInfo {
  int terms_available;     // explicit correction terms beyond the leading one, plus one
  double next_order;       // decay exponent (relative to the leading term) of the first omitted term
  cplx leading;            // leading term alone
};
// Explicit large-zeta expansions of the region I entries. n_terms counts series terms kept (>= 1).
cplx asymptotic_entry(int i, int j, int r, double tau, cplx zeta, int n_terms);
ExpansionInfo expansion_info(int i, int j, int r, double tau, cplx zeta, int n_terms);

// Rows: derivatives 0..2, columns: C1, C2, C3, order r.
Matrix3c wronskian_chi(int r, cplx zeta, double tau, double tol = 1e-12);
// Rows: Chat_1..3, column m: int s^{m-1} (s+tau)^{-(r+1)} e^{s^3/3 - zeta s} ds.
Matrix3c dual_wronskian(int r, cplx zeta, double tau, double tol = 1e-12);
// Pairing matrix between the two Wronskians: [[zeta, -tau, -1], [-tau, -1, 0], [-1, 0, 0]].
Matrix3c pairing_matrix(cplx zeta, double tau);
// The matrix the bilinear concomitant actually produces; equals -pairing_matrix.
Matrix3c concomitant_matrix(cplx zeta, double tau);

}  // namespace rairy::genairy
