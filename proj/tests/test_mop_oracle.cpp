#include <doctest.h>

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <sstream>

#include "rairy/mop_oracle.hpp"

using namespace rairy;
using namespace rairy::mop;

namespace {

using Real40 = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<50>>;

// GUE kernel for e^{-n x^2/2} from normalized Hermite functions of s = sqrt(n/2) x:
// K(x, y) = sqrt(n/2) sum_{k<n} h_k(s) h_k(t).
Real40 hermite_kernel(int n, const Real40& x, const Real40& y) {
  using boost::multiprecision::exp;
  using boost::multiprecision::sqrt;
  const Real40 scale = sqrt(Real40(n) / 2);
  const Real40 s = scale * x, t = scale * y;
  const Real40 pi = boost::math::constants::pi<Real40>();
  Real40 hs_prev = 0, ht_prev = 0;
  Real40 hs = exp(-s * s / 2) / sqrt(sqrt(pi)), ht = exp(-t * t / 2) / sqrt(sqrt(pi));
  Real40 sum = hs * ht;
  for (int k = 0; k + 1 < n; ++k) {
    const Real40 c1 = sqrt(Real40(2) / (k + 1)), c0 = sqrt(Real40(k) / (k + 1));
    const Real40 hs_next = c1 * s * hs - c0 * hs_prev, ht_next = c1 * t * ht - c0 * ht_prev;
    hs_prev = hs, ht_prev = ht;
    hs = hs_next, ht = ht_next;
    sum += hs * ht;
  }
  return scale * sum;
}

}  // namespace

TEST_CASE("GUE kernel against the Hermite-function recurrence") {
  const BiorthogonalSystem sys({10, 0, 0.0, 40});
  const Real40 mine(sys.kernel_decimal(0.1, 0.3));
  const Real40 ref = hermite_kernel(10, Real40(0.1), Real40(0.3));  // same binary inputs
  CHECK(static_cast<double>(abs(mine - ref)) < 1e-20);
  for (int n : {3, 17, 40})
    for (auto [x, y] : {std::pair{0.0, 0.0}, std::pair{-1.2, 0.7}, std::pair{1.9, 2.05}}) {
      const BiorthogonalSystem s({n, 0, 0.0, 60});
      const double ref_xy = static_cast<double>(hermite_kernel(n, Real40(x), Real40(y)));
      CHECK(std::abs(s.kernel(x, y) - ref_xy) < 1e-13 * std::max(1.0, std::abs(ref_xy)));
    }
}

TEST_CASE("trace and reproducing property") {
  const BiorthogonalSystem a({8, 1, 0.5, 60});
  CHECK(a.trace_error() < 1e-15);
  const BiorthogonalSystem b({6, 1, 0.7, 60});
  CHECK(b.reproducing_error(0.2, -0.1) < 1e-15);
  const BiorthogonalSystem c({20, 3, 1.2, 60});
  CHECK(c.trace_error() < 1e-15);
  CHECK(c.reproducing_error(1.5, 0.4) < 1e-15);
}

TEST_CASE("biorthogonality in working precision") {
  for (int digits : {40, 60, 100}) {
    const BiorthogonalSystem s({12, 2, 0.9, digits});
    CHECK(s.biorthogonality_residual() < std::pow(10.0, -(digits - 5 - s.digits_lost())));
  }
}

TEST_CASE("two-point correlations are nonnegative; the source breaks symmetry") {
  const BiorthogonalSystem s({10, 2, 1.0, 60});
  const double pts[] = {-1.5, -0.3, 0.4, 1.1, 1.8};
  for (double x : pts)
    for (double y : pts) {
      const double det = s.kernel(x, x) * s.kernel(y, y) - s.kernel(x, y) * s.kernel(y, x);
      CHECK(det >= -1e-30);
    }
  CHECK(std::abs(s.kernel(0.3, 1.4) - s.kernel(1.4, 0.3)) > 1e-6);
  const BiorthogonalSystem g({10, 0, 0.0, 60});
  CHECK(std::abs(g.kernel(0.3, 1.4) - g.kernel(1.4, 0.3)) < 1e-14);
}

TEST_CASE("precision requests and validation") {
  bool thrown = false;
  try {
    BiorthogonalSystem s({40, 6, 3.0, 20});
  } catch (const PrecisionInsufficient& e) {
    thrown = true;
    CHECK(e.suggested_digits > 20);
    CHECK_NOTHROW(BiorthogonalSystem({40, 6, 3.0, e.suggested_digits}));
  }
  CHECK(thrown);
  CHECK_THROWS_AS(validate({41, 0, 0.0, 60}), DomainError);
  CHECK_THROWS_AS(validate({10, 11, 0.0, 60}), DomainError);
  CHECK_THROWS_AS(validate({10, 1, 0.0, 10}), DomainError);
  CHECK_THROWS_AS(validate({10, 1, std::nan(""), 60}), DomainError);
}

TEST_CASE("edge scaling limit") {
  const std::vector<std::pair<double, double>> grid{{0.0, 0.0}, {1.0, 0.5}, {-1.0, 2.0}};
  // r = 0: finite-n Airy corrections are O(n^{-2/3})
  const ScalingTable t0 = verify_scaling_limit({10, 20, 40}, 0, 0.0, grid);
  REQUIRE(t0.slopes.size() == grid.size());
  for (double s : t0.slopes) CHECK(s < -2.0 / 3.0 + 0.1);
  // with a source at tau = -1, 0, 1 every point converges and the limits differ
  std::vector<double> at_origin;
  for (double tau : {-1.0, 0.0, 1.0}) {
    const ScalingTable t = verify_scaling_limit({10, 20, 40}, 1, tau, grid);
    for (double s : t.slopes) CHECK(s < -0.15);
    for (const auto& row : t.rows)
      if (row.zeta_x == 0.0 && row.zeta_y == 0.0 && row.n == 40) at_origin.push_back(row.K_limit);
  }
  REQUIRE(at_origin.size() == 3);
  CHECK(std::abs(at_origin[0] - at_origin[1]) > 0.05);
  CHECK(std::abs(at_origin[1] - at_origin[2]) > 0.02);

  std::ostringstream os;
  write_csv(os, t0);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# schema=1");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 1 + 9);
  CHECK(fit_slope({0.0, 1.0, 2.0}, {1.0, -1.0, -3.0}) == doctest::Approx(-2.0));
}
