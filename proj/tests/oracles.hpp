#pragma once
// Independent reference values used only by the tests.

#include <cmath>
#include <complex>
#include <utility>

#include <Eigen/Dense>

namespace oracle {

// Maclaurin series for Ai and Ai' in long double; fine for |x| <= 5.
struct AiryPair {
  long double ai, aip;
};

inline AiryPair airy_series(long double x) {
  const long double c1 = 0.355028053887817239260063186004183176L;  // Ai(0)
  const long double c2 = 0.258819403792806798405183560189203963L;  // -Ai'(0)
  // f = 1 + x^3/3! + 1*4 x^6/6! + ..., g = x + 2 x^4/4! + 2*5 x^7/7! + ...
  long double f = 1, g = x, fp = 0, gp = 1;
  long double tf = 1, tg = x;
  for (int k = 1; k < 200; ++k) {
    tf *= x * x * x / ((3.0L * k - 1) * (3.0L * k));
    tg *= x * x * x / ((3.0L * k) * (3.0L * k + 1));
    f += tf;
    g += tg;
    fp += tf * (3.0L * k) / x;
    gp += tg * (3.0L * k + 1) / x;
    if (std::fabs(tf) + std::fabs(tg) < 1e-30L) break;
  }
  if (x == 0) {
    fp = 0;
    gp = 1;
  }
  return {c1 * f - c2 * g, c1 * fp - c2 * gp};
}

inline double ai(double x) { return static_cast<double>(airy_series(x).ai); }
inline double aip(double x) { return static_cast<double>(airy_series(x).aip); }

inline double airy_kernel(double x, double y) {
  if (std::abs(x - y) < 1e-9) return aip(x) * aip(x) - x * ai(x) * ai(x);
  return (ai(x) * aip(y) - aip(x) * ai(y)) / (x - y);
}

// Endpoints from the two moment conditions, written as Gauss-Chebyshev means over the cut:
//   mean V'(x_k) = 0,  mean x_k V'(x_k) = 2 mass,  x_k = c + h cos(theta_k).
template <class Deriv>
inline std::pair<double, double> one_cut_endpoints(Deriv Vp, double mass = 1.0) {
  const int N = 400;
  auto F = [&](double c, double h) {
    double m0 = 0, m1 = 0;
    for (int k = 0; k < N; ++k) {
      const double x = c + h * std::cos(3.14159265358979323846 * (k + 0.5) / N);
      m0 += Vp(x) / N;
      m1 += x * Vp(x) / N;
    }
    return Eigen::Vector2d{m0, m1 - 2.0 * mass};
  };
  Eigen::Vector2d u{0.0, 1.0};
  for (int it = 0; it < 100; ++it) {
    const Eigen::Vector2d f = F(u[0], u[1]);
    if (f.norm() < 1e-15) break;
    Eigen::Matrix2d J;
    const double d = 1e-7;
    J.col(0) = (F(u[0] + d, u[1]) - F(u[0] - d, u[1])) / (2 * d);
    J.col(1) = (F(u[0], u[1] + d) - F(u[0], u[1] - d)) / (2 * d);
    Eigen::Vector2d step = J.partialPivLu().solve(-f);
    double lam = 1.0;
    while (u[1] + lam * step[1] <= 0.0) lam *= 0.5;
    u += lam * step;
  }
  return {u[0] - u[1], u[0] + u[1]};
}

}  // namespace oracle
