#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rairy/contour.hpp"

using namespace rairy;
using namespace rairy::contour;

namespace {
bool near(cplx a, cplx b, double tol) { return std::abs(a - b) < tol; }

double cross(cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); }

// Signed count of proper crossings between two polylines.
int intersection_number(const Contour& a, const Contour& b) {
  const auto pa = a.sample(256), pb = b.sample(256);
  int total = 0;
  for (std::size_t i = 0; i + 1 < pa.size(); ++i)
    for (std::size_t k = 0; k + 1 < pb.size(); ++k) {
      const cplx d1 = pa[i + 1] - pa[i], d2 = pb[k + 1] - pb[k], w = pb[k] - pa[i];
      const double den = cross(d1, d2);
      if (std::abs(den) < 1e-14) continue;
      const double u = cross(w, d2) / den, v = cross(w, d1) / den;
      if (u >= 0.0 && u < 1.0 && v >= 0.0 && v < 1.0) total += den > 0 ? 1 : -1;
    }
  return total;
}
}  // namespace

TEST_CASE("airy contours: geometry") {
  const Contour c1 = make_airy_contour(1, 0.0, 10.0);
  CHECK(near(c1.start(), std::polar(10.0, -2.0 * pi / 3.0), 1e-9));
  CHECK(near(c1.end(), std::polar(10.0, 2.0 * pi / 3.0), 1e-9));

  const Contour c4 = make_airy_contour(4, 2.0, 10.0);
  CHECK(near(c4.start(), cplx{-2.0, 0.0}, 1e-12));
  CHECK(near(c4.end(), cplx{10.0, 0.0}, 1e-9));
  for (const auto& p : c4.sample(8)) CHECK(std::abs(p.imag()) < 1e-12);

  const Contour c3 = make_airy_contour(3, 0.0, 10.0);
  const bool from_origin = near(c3.start(), 0.0, 1e-12) && near(c3.end(), std::polar(10.0, 2.0 * pi / 3.0), 1e-9);
  const bool to_origin = near(c3.end(), 0.0, 1e-12) && near(c3.start(), std::polar(10.0, 2.0 * pi / 3.0), 1e-9);
  CHECK((from_origin || to_origin));

  CHECK_THROWS_AS(make_airy_contour(0, 0.0, 10.0), DomainError);
  CHECK_THROWS_AS(make_airy_contour(7, 0.0, 10.0), DomainError);
  CHECK_THROWS_AS(make_airy_contour(1, 0.0, -1.0), DomainError);
}

TEST_CASE("dual contours: geometry and orientation") {
  const Contour h3 = make_dual_contour(3, 1.0, 10.0);
  CHECK(h3.closed());
  for (const auto& p : h3.sample(16)) CHECK(std::abs(std::abs(p + 1.0) - 1.0) < 1e-9);
  const auto res = integrate([](cplx t) { return 1.0 / (t + 1.0); }, h3, 1e-12);
  CHECK(near(res.value, two_pi_i, 1e-10));

  const Contour h2 = make_dual_contour(2, 0.0, 10.0);
  REQUIRE(h2.end_angles().size() == 2);
  CHECK(h2.end_angles()[0] == doctest::Approx(pi / 3.0));
  CHECK(h2.end_angles()[1] == doctest::Approx(-pi / 3.0));
  CHECK(h2.start().imag() > 0.0);
  CHECK(h2.end().imag() < 0.0);
  double max_re = -1e300;
  for (const auto& p : h2.sample(16)) max_re = std::max(max_re, p.real());
  CHECK(max_re > 0.0);

  CHECK_THROWS_AS(make_dual_contour(4, 0.0, 10.0), DomainError);
}

TEST_CASE("intersection numbers of ray and dual contours form the identity") {
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      const Contour cj = make_airy_contour(j, 0.4, 8.0);
      const Contour hi = make_dual_contour(i, 0.4, 8.0);
      CHECK(std::abs(intersection_number(cj, hi)) == (i == j ? 1 : 0));
    }
}

TEST_CASE("integrate: closed contours and the Airy integral") {
  const Contour h3 = make_dual_contour(3, 1.0, 10.0);
  CHECK(std::abs(integrate([](cplx) { return cplx{1.0, 0.0}; }, h3, 1e-12).value) < 1e-12);

  const Contour c1 = make_airy_contour(1, 0.0, 10.0);
  const auto ai0 = integrate([](cplx t) { return std::exp(-t * t * t / 3.0); }, c1, 1e-10);
  CHECK(near(ai0.value, two_pi_i * oracle::ai(0.0), 1e-9));
  CHECK(ai0.error_estimate <= 1e-10);
}

TEST_CASE("integrate_double: products and closed contours") {
  const Contour c1 = make_airy_contour(1, 0.0, 10.0);
  const auto f = [](cplx s, cplx t) { return std::exp(-t * t * t / 3.0 - s * s * s / 3.0); };
  const auto r = integrate_double(f, c1, c1, 1e-10, false);
  const cplx single = two_pi_i * oracle::ai(0.0);
  CHECK(near(r.value, single * single, 1e-8));

  const Contour h3 = make_dual_contour(3, 0.0, 10.0);
  const auto z = integrate_double([](cplx, cplx) { return cplx{1.0, 0.0}; }, h3, h3, 1e-10, false);
  CHECK(std::abs(z.value) < 1e-10);

  // factorizes into a residue on the circle times a ray integral along C4
  const double tau = 1.0;
  const auto h = [&](cplx s, cplx t) { return std::exp(-t * t * t / 3.0) / ((s + tau) * (t + tau + 1.0)); };
  const auto ray = [&](cplx t) { return std::exp(-t * t * t / 3.0) / (t + tau + 1.0); };
  const Contour loop = make_dual_contour(3, tau, 10.0, 0.5);
  const Contour c4a = make_airy_contour(4, tau, 10.0);
  const Contour c4b = make_airy_contour(4, tau, 20.0);
  const auto two = integrate_double(h, loop, c4a, 1e-10, false);
  const auto two_b = integrate_double(h, loop, c4b, 1e-10, false);
  const cplx oracle = two_pi_i * integrate(ray, c4a, 1e-12).value;
  CHECK(near(two.value, oracle, 1e-8));
  CHECK(near(two.value, two_b.value, 1e-9));
}

TEST_CASE("integrate_double: intersecting contours with a singular kernel") {
  const Contour c1 = make_airy_contour(1, 0.0, 10.0);
  const Contour h1 = make_dual_contour(1, 0.0, 10.0);
  const auto f = [](cplx s, cplx t) { return 1.0 / (t - s); };
  CHECK_THROWS_AS(integrate_double(f, h1, c1, 1e-8, true), ContourIntersection);
}

TEST_CASE("deformation invariance under the truncation radius") {
  for (int m = 1; m <= 6; ++m) {
    const auto f = [](cplx t) { return std::exp(0.7 * t - t * t * t / 3.0); };
    const double tau = 0.3;
    const auto a = integrate(f, make_airy_contour(m, tau, 8.0), 1e-11);
    const auto b = integrate(f, make_airy_contour(m, tau, 16.0), 1e-11);
    CHECK(std::abs(a.value - b.value) < 1e-10);
  }
}

TEST_CASE("gauss-legendre rule integrates polynomials exactly") {
  const auto& g = gauss_legendre(10);
  double s = 0.0;
  for (std::size_t k = 0; k < g.nodes.size(); ++k) s += g.weights[k] * std::pow(g.nodes[k], 18);
  CHECK(s == doctest::Approx(2.0 / 19.0).epsilon(1e-14));
}
