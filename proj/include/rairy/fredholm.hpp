#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "rairy/kernel.hpp"

namespace rairy::fredholm {

struct GapSpec {
  double s = 0.0;
  int r = 0;
  double tau = 0.0;
  int quad_order = 40;
  std::optional<double> domain_cap;  // default s + 12, pushed right until the diagonal is < 1e-12
  double kernel_tol = 1e-9;
};

void validate(const GapSpec& g);

struct GapResult {
  double value = 0.0;
  double est_error = 0.0;
  bool underflow = false;
  double cap = 0.0;  // right end actually used
};

// (x, y) -> K(x, y) and its absolute error.
using KernelFn = std::function<kernel::KernelValue(double, double)>;

// Memoised r-Airy kernel for one (r, tau, tol); safe to share between threads.
class KernelCache {
 public:
  KernelCache(int r, double tau, double tol);
  kernel::KernelValue operator()(double x, double y) const;
  int r() const { return r_; }
  double tau() const { return tau_; }
  std::size_t size() const;

 private:
  int r_;
  double tau_, tol_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<double, double>, kernel::KernelValue> values_;
};

// det(I - W^{1/2} K W^{1/2}) on Gauss-Legendre nodes over [s, cap]; est_error compares with a
// lower order and adds the kernel quadrature error and the truncated tail.
GapResult gap_probability(const GapSpec& g);
GapResult gap_probability(const GapSpec& g, const KernelCache& cache);
// Same determinant with an arbitrary kernel (classical Airy oracle path); r and tau are ignored.
GapResult gap_probability(const GapSpec& g, const KernelFn& kernel);

struct CdfTable {
  std::vector<double> s_grid;
  std::vector<double> F_values;
  std::vector<double> point_errors;
  double est_error = 0.0;  // max over the grid
};

CdfTable fr_cdf_grid(const std::vector<double>& s_values, int r, double tau, int quad_order,
                     double kernel_tol = 1e-9);

void write_csv(std::ostream& os, const CdfTable& t);

// Threads used for matrix assembly; 0 means hardware concurrency.
void set_assembly_threads(unsigned n);

}  // namespace rairy::fredholm
