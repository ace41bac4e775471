#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "rairy/contour.hpp"
#include "rairy/fredholm.hpp"

using namespace rairy;
using namespace rairy::fredholm;

namespace {

// Classical Airy kernel from the series oracle, with the asymptotic form past 5.
kernel::KernelValue airy_oracle_kernel(double x, double y) {
  if (std::max(x, y) <= 5.0) return {oracle::airy_kernel(x, y), 0.0};
  return {kernel::airy_kernel_classical(x, y), 0.0};
}

}  // namespace

TEST_CASE("r = 0 reproduces the GUE Tracy-Widom law") {
  // same determinant with the classical kernel from the series oracle at doubled order
  for (double s : {-3.0, -1.0, 0.0}) {
    const GapResult direct = gap_probability({s, 0, 0.0, 40});
    const GapResult via_oracle = gap_probability({s, 0, 0.0, 80}, KernelFn(airy_oracle_kernel));
    CHECK(std::abs(via_oracle.value - direct.value) < 1e-6);
    CHECK(direct.est_error < 1e-6);
  }
}

TEST_CASE("far right tail: one minus F_1 is the trace of the kernel") {
  const double s = 6.0;
  const GapResult g = gap_probability({s, 1, 0.0, 40});
  // 1 - det(I - K) = tr K + O((tr K)^2) for small K
  const auto& rule = contour::gauss_legendre(60);
  const double cap = s + 10.0;
  double trace = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double x = s + 0.5 * (rule.nodes[k] + 1.0) * (cap - s);
    trace += 0.5 * (cap - s) * rule.weights[k] * kernel::kernel_diagonal(x, {1, 0.0, 1e-11, 1.0}).value;
  }
  CHECK(trace > 0.0);
  CHECK(std::abs((1.0 - g.value) - trace) < trace * trace + 1e-10);
  CHECK(g.value < 1.0);
  CHECK(g.value > 1.0 - 1e-5);
}

TEST_CASE("more outliers push the top eigenvalue right") {
  double prev = 2.0;
  for (int r : {0, 1, 2}) {
    const double F = gap_probability({0.0, r, 0.0, 40}).value;
    CHECK(F > 0.0);
    CHECK(F < 1.0);
    CHECK(F < prev);
    prev = F;
  }
}

TEST_CASE("grid tables") {
  std::vector<double> grid;
  for (int k = 0; k <= 32; ++k) grid.push_back(-5.0 + 0.25 * k);
  const CdfTable t0 = fr_cdf_grid(grid, 0, 0.0, 40);
  const CdfTable t1 = fr_cdf_grid(grid, 1, 0.0, 40);
  REQUIRE(t0.F_values.size() == grid.size());
  CHECK(t0.F_values.front() < 1e-4);
  CHECK(t0.F_values.back() > 1.0 - 1e-4);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (k > 0) CHECK(t0.F_values[k] >= t0.F_values[k - 1] - t0.point_errors[k] - t0.point_errors[k - 1]);
    if (k > 0) CHECK(t1.F_values[k] >= t1.F_values[k - 1] - t1.point_errors[k] - t1.point_errors[k - 1]);
    CHECK(t1.F_values[k] <= t0.F_values[k] + t0.point_errors[k] + t1.point_errors[k]);
    for (double F : {t0.F_values[k], t1.F_values[k]}) {
      CHECK(F >= -1e-8);
      CHECK(F <= 1.0 + 1e-8);
    }
  }
  CHECK(fr_cdf_grid({}, 1, 0.0, 40).s_grid.empty());
  CHECK_THROWS_AS(fr_cdf_grid({0.0, -1.0}, 1, 0.0, 40), DomainError);

  std::ostringstream os;
  write_csv(os, t0);
  CHECK(os.str().rfind("# schema=1\ns,F,est_error\n", 0) == 0);
}

TEST_CASE("quadrature self-convergence") {
  for (int r : {0, 1, 2})
    for (double tau : {-1.0, 0.0, 1.0})
      for (double s : {-3.0, 0.0, 2.0}) {
        const double a = gap_probability({s, r, tau, 40}).value;
        const double b = gap_probability({s, r, tau, 80}).value;
        CHECK(std::abs(a - b) < 1e-6);
      }
}

TEST_CASE("gap spec validation") {
  CHECK_THROWS_AS(validate({0.0, -1, 0.0, 40}), DomainError);
  CHECK_THROWS_AS(validate({0.0, 1, 0.0, 2}), DomainError);
  CHECK_THROWS_AS(validate({std::nan(""), 1, 0.0, 40}), DomainError);
  GapSpec bad{0.0, 1, 0.0, 40};
  bad.domain_cap = -1.0;
  CHECK_THROWS_AS(validate(bad), DomainError);
}
