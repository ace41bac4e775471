#include "rairy/fredholm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include <Eigen/Dense>

#include "rairy/contour.hpp"

namespace rairy::fredholm {

namespace {

std::atomic<unsigned> assembly_threads{0};

unsigned thread_count() {
  unsigned n = assembly_threads.load();
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

constexpr double diagonal_floor = 1e-12;
constexpr double default_length = 12.0;

double choose_cap(const GapSpec& g, const KernelFn& k) {
  if (g.domain_cap) return *g.domain_cap;
  double cap = g.s + default_length;
  for (int it = 0; it < 40; ++it) {
    const double d = std::abs(k(cap, cap).value);
    if (!std::isfinite(d)) throw NumericalFailure("kernel not finite on the diagonal");
    if (d < diagonal_floor) return cap;
    cap += 2.0;
  }
  throw NumericalFailure("kernel diagonal does not decay; cannot truncate the domain");
}

struct Det {
  double value;
  bool underflow;
  double kernel_err;  // first-order effect of the entry errors
};

Det nystrom(double s, double cap, int order, const KernelFn& k) {
  const auto& rule = contour::gauss_legendre(order);
  const double half = 0.5 * (cap - s);
  std::vector<double> x(order), sw(order);
  for (int i = 0; i < order; ++i) {
    x[i] = s + half * (rule.nodes[i] + 1.0);
    sw[i] = std::sqrt(half * rule.weights[i]);
  }
  Eigen::MatrixXd A(order, order);
  Eigen::MatrixXd E(order, order);
  std::atomic<bool> bad{false};
  auto fill_rows = [&](int first, int stride) {
    for (int i = first; i < order; i += stride)
      for (int j = 0; j < order; ++j) {
        const auto kv = k(x[i], x[j]);
        if (!std::isfinite(kv.value)) bad = true;
        A(i, j) = (i == j ? 1.0 : 0.0) - sw[i] * kv.value * sw[j];
        E(i, j) = sw[i] * kv.abs_error * sw[j];
      }
  };
  const unsigned nt = std::min<unsigned>(thread_count(), static_cast<unsigned>(order));
  if (nt <= 1) {
    fill_rows(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(fill_rows, static_cast<int>(t), static_cast<int>(nt));
  }
  if (bad) throw NumericalFailure("kernel value not finite");

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const Eigen::MatrixXd& LU = lu.matrixLU();
  double logabs = 0.0;
  int sign = lu.permutationP().determinant();
  for (int i = 0; i < order; ++i) {
    const double d = LU(i, i);
    if (d == 0.0) return {0.0, true, 0.0};
    if (d < 0) sign = -sign;
    logabs += std::log(std::abs(d));
  }
  // first-order perturbation: |d det| <= |det| sum_ij |A^{-1}_ji| E_ij
  const Eigen::MatrixXd inv = lu.inverse();
  const double rel = inv.transpose().cwiseAbs().cwiseProduct(E).sum();
  if (logabs < std::log(std::numeric_limits<double>::min())) return {0.0, true, rel};
  const double det = sign * std::exp(logabs);
  return {det, false, rel * std::abs(det)};
}

GapResult run(const GapSpec& g, const KernelFn& k) {
  validate(g);
  const double cap = choose_cap(g, k);
  if (!(cap > g.s)) throw PreconditionError("domain_cap must exceed s");
  const Det hi = nystrom(g.s, cap, g.quad_order, k);
  const int lower = std::max(8, (2 * g.quad_order) / 3);
  const Det lo = nystrom(g.s, cap, lower, k);
  const double tail = std::abs(k(cap, cap).value);
  GapResult res;
  res.value = hi.value;
  res.underflow = hi.underflow;
  res.cap = cap;
  res.est_error = std::abs(hi.value - lo.value) + hi.kernel_err + tail;
  return res;
}

}  // namespace

void validate(const GapSpec& g) {
  if (!std::isfinite(g.s)) throw DomainError("s must be finite");
  if (g.quad_order < 8) throw DomainError("quad_order must be >= 8");
  if (g.r < 0) throw DomainError("r must be >= 0");
  if (!std::isfinite(g.tau)) throw DomainError("tau must be finite");
  if (g.domain_cap && !(*g.domain_cap > g.s)) throw DomainError("domain_cap must exceed s");
}

KernelCache::KernelCache(int r, double tau, double tol) : r_(r), tau_(tau), tol_(tol) {
  kernel::validate({r, tau, tol, 1.0});
}

kernel::KernelValue KernelCache::operator()(double x, double y) const {
  {
    std::lock_guard lock(mu_);
    auto it = values_.find({x, y});
    if (it != values_.end()) return it->second;
  }
  const auto v = kernel::r_airy_kernel(x, y, {r_, tau_, tol_, 1.0});
  std::lock_guard lock(mu_);
  values_.emplace(std::make_pair(x, y), v);
  return v;
}

std::size_t KernelCache::size() const {
  std::lock_guard lock(mu_);
  return values_.size();
}

GapResult gap_probability(const GapSpec& g) {
  KernelCache cache(g.r, g.tau, g.kernel_tol);
  return gap_probability(g, cache);
}

GapResult gap_probability(const GapSpec& g, const KernelCache& cache) {
  if (cache.r() != g.r || cache.tau() != g.tau) throw PreconditionError("cache built for other (r, tau)");
  return run(g, [&](double x, double y) { return cache(x, y); });
}

GapResult gap_probability(const GapSpec& g, const KernelFn& kernel) { return run(g, kernel); }

CdfTable fr_cdf_grid(const std::vector<double>& s_values, int r, double tau, int quad_order,
                     double kernel_tol) {
  if (!std::is_sorted(s_values.begin(), s_values.end())) throw DomainError("s grid must be sorted");
  CdfTable t;
  if (s_values.empty()) return t;
  KernelCache cache(r, tau, kernel_tol);
  for (double s : s_values) {
    GapSpec g;
    g.s = s;
    g.r = r;
    g.tau = tau;
    g.quad_order = quad_order;
    g.kernel_tol = kernel_tol;
    const auto res = gap_probability(g, cache);
    t.s_grid.push_back(s);
    t.F_values.push_back(res.value);
    t.point_errors.push_back(res.est_error);
    t.est_error = std::max(t.est_error, res.est_error);
  }
  return t;
}

void write_csv(std::ostream& os, const CdfTable& t) {
  os << "# schema=1\n";
  os << "s,F,est_error\n";
  os.precision(17);
  for (std::size_t i = 0; i < t.s_grid.size(); ++i)
    os << t.s_grid[i] << ',' << t.F_values[i] << ',' << t.point_errors[i] << '\n';
}

void set_assembly_threads(unsigned n) { assembly_threads = n; }

}  // namespace rairy::fredholm
