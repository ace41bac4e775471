#pragma once

#include <optional>

#include "rairy/common.hpp"
#include "rairy/contour.hpp"

namespace rairy::kernel {

struct KernelParams {
  int r = 0;
  double tau = 0.0;
  double tol = 1e-10;
  double contour_scale = 1.0;  // sets both the pole clearance and the t/s gap
};

void validate(const KernelParams& p);

struct KernelValue {
  double value = 0.0;
  double abs_error = 0.0;  // quadrature estimate plus |Im| of the raw complex sum
};

// t runs on the left contour (rays at +-2pi/3), s on the right one (rays at +-pi/3, downward).
// When the s-contour passes right of -tau the pole is picked up by a counterclockwise loop.
struct KernelContours {
  contour::Contour t_path;
  contour::Contour s_path;
  std::optional<contour::Contour> s_loop;
  double gap;  // min |t - s| over both
};

KernelContours kernel_contours(double zx, double zy, const KernelParams& p);

// (1/(2 pi i)^2) int_s int_t ((t+tau)/(s+tau))^r e^{(s^3 - t^3)/3 + zx t - zy s} / (t - s) dt ds
KernelValue r_airy_kernel(double zx, double zy, const KernelParams& p);
// Same integral over caller-supplied contours (used to test deformation invariance).
KernelValue r_airy_kernel_on(double zx, double zy, const KernelParams& p, const KernelContours& c);
// The contours are disjoint, so the diagonal is the same integral at zy = zx.
KernelValue kernel_diagonal(double z, const KernelParams& p);

// (Ai(x) Ai'(y) - Ai'(x) Ai(y)) / (x - y), with the derivative limit on the diagonal.
double airy_kernel_classical(double x, double y);

// Which argument rides with which integration variable in the Brownian-motion form.
// Transposed attaches zx to a, which after the change of variables gives K(zy, zx).
enum class AdlerPairing { Matched, Transposed };

// (1/(2 pi i)^2) int_a int_b ((-ib - tau)/(ia - tau))^r e^{(i a^3 + i b^3)/3 + i a u + i b v} / (ia + ib)
// over two V-shaped contours from inf e^{5 pi i/6} to inf e^{pi i/6}; -i tau lies above the a-contour.
KernelValue adler_kernel(double zx, double zy, const KernelParams& p,
                         AdlerPairing pairing = AdlerPairing::Matched);

// Bilinear pairing of Ai^{(r-1)}_{C_j} with the dual solution on Chat_i, as a double integral.
cplx concomitant(int i, int j, int r, double tau, cplx zeta, double tol = 1e-10);

// (chi_{r-1}(zy)^{-1} chi_{r-1}(zx))_{ij} for i != j, double integral with the 1/(t - s) factor.
cplx chi_transfer(int i, int j, double zx, double zy, int r, double tau, double tol = 1e-10);
// The same entry before integrating by parts: polynomial factor, no 1/(t - s).
cplx chi_transfer_polynomial(int i, int j, double zx, double zy, int r, double tau,
                             double tol = 1e-10);
// The same entry from the Wronskians: (chihat_{r-1}(zy) F'(zy) chi_{r-1}(zx))_{ij}, F' the concomitant matrix.
cplx chi_transfer_wronskian(int i, int j, double zx, double zy, int r, double tau,
                            double tol = 1e-12);
// Kernel with s on Chat_2 + Chat_3 and t on C_1.
KernelValue kernel_via_dual_contours(double zx, double zy, const KernelParams& p);

}  // namespace rairy::kernel
