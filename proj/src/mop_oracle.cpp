#include "rairy/mop_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include "rairy/equilibrium.hpp"
#include "rairy/kernel.hpp"

namespace rairy::mop {

namespace {

using Real = boost::multiprecision::mpfr_float;
using Vec = std::vector<Real>;
using Mat = std::vector<Vec>;

// Sets the default multiprecision for the lifetime of the guard.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(int digits) : saved_(Real::default_precision()) {
    Real::default_precision(static_cast<unsigned>(digits));
  }
  ~PrecisionGuard() { Real::default_precision(saved_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_;
};

Real log10_abs(const Real& v) { return v == 0 ? Real(-1000) : Real(log10(abs(v))); }

// Inverse by Gauss-Jordan with partial pivoting.
Mat invert(Mat A) {
  const std::size_t m = A.size();
  Mat inv(m, Vec(m, Real(0)));
  for (std::size_t i = 0; i < m; ++i) inv[i][i] = 1;
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < m; ++i)
      if (abs(A[i][c]) > abs(A[piv][c])) piv = i;
    if (A[piv][c] == 0) throw PrecisionInsufficient("singular Gram block", 0);
    std::swap(A[c], A[piv]);
    std::swap(inv[c], inv[piv]);
    const Real d = A[c][c];
    for (std::size_t j = 0; j < m; ++j) {
      A[c][j] /= d;
      inv[c][j] /= d;
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (i == c || A[i][c] == 0) continue;
      const Real f = A[i][c];
      for (std::size_t j = 0; j < m; ++j) {
        A[i][j] -= f * A[c][j];
        inv[i][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

Real inf_norm(const Mat& A) {
  Real best = 0;
  for (const auto& row : A) {
    Real s = 0;
    for (const auto& v : row) s += abs(v);
    if (s > best) best = s;
  }
  return best;
}

}  // namespace

struct BiorthogonalSystem::Impl {
  MopParams p;
  Real n, a;
  Real h0;  // normalisation of the degree-0 polynomial
  Mat coeff;  // coeff[i][j]: x^j coefficient of the orthonormal polynomial of degree i
  Mat V;      // V[i][m] = int P_i P_m e^{-n(x^2/2 - a x)}, i < n, m < r
  Mat W;      // V_top * V_bot^{-1}, (n-r) x r
  Mat Vbinv;  // r x r
  double lost = 0.0;

  // Hermite functions P_i(x) e^{-n x^2/4}, i < n.
  Vec functions(const Real& x) const {
    const int N = p.n;
    Vec phi(N);
    const Real s = sqrt(n) * x;
    phi[0] = h0 * exp(-n * x * x / 4);
    if (N > 1) phi[1] = s * phi[0];
    for (int k = 1; k + 1 < N; ++k)
      phi[k + 1] = (s * phi[k] - sqrt(Real(k)) * phi[k - 1]) / sqrt(Real(k + 1));
    return phi;
  }

  // The y-side combinations Q_i(y) e^{n V(y)/2}, i < n.
  Vec duals(const Real& y) const {
    const int N = p.n, r = p.r, m0 = N - r;
    const Vec phi = functions(y);
    Vec q(N);
    for (int i = 0; i < m0; ++i) q[i] = phi[i];
    const Real shift = exp(n * a * y);
    for (int c = 0; c < r; ++c) {
      Real v = 0;
      for (int l = 0; l < m0; ++l) v -= W[l][c] * phi[l];
      Real w = 0;
      for (int m = 0; m < r; ++m) w += Vbinv[m][c] * phi[m];
      q[m0 + c] = v + shift * w;
    }
    return q;
  }

  Real kernel(const Real& x, const Real& y) const {
    const Vec fx = functions(x);
    const Vec qy = duals(y);
    Real s = 0;
    for (int i = 0; i < p.n; ++i) s += fx[i] * qy[i];
    return s;
  }

  Real from_vectors(const Vec& fx, const Vec& qy) const {
    Real s = 0;
    for (int i = 0; i < p.n; ++i) s += fx[i] * qy[i];
    return s;
  }

  // trapezoid nodes covering both weights
  std::vector<Real> nodes(Real& step) const {
    step = Real(0.3) / sqrt(n);
    const Real lo = -12 + std::min(0.0, p.a), hi = 12 + std::max(0.0, p.a);
    std::vector<Real> t;
    for (Real x = lo; x <= hi; x += step) t.push_back(x);
    return t;
  }
};

void validate(const MopParams& p) {
  if (p.n < 1 || p.n > 40) throw DomainError("n must lie in [1, 40]");
  if (p.r < 0 || p.r > p.n) throw DomainError("r must lie in [0, n]");
  if (!std::isfinite(p.a)) throw DomainError("a must be finite");
  if (p.digits < 20 || p.digits > 2000) throw DomainError("digits must lie in [20, 2000]");
}

BiorthogonalSystem::BiorthogonalSystem(const MopParams& p) {
  validate(p);
  PrecisionGuard guard(p.digits);
  auto im = std::make_shared<Impl>();
  im->p = p;
  im->n = p.n;
  im->a = p.a;
  const int N = p.n, r = p.r, m0 = N - r;
  const Real& n = im->n;
  const Real& a = im->a;
  im->h0 = pow(n / (2 * boost::math::constants::pi<Real>()), Real(0.25));

  // monomial coefficients from the recurrence P_{k+1} = (sqrt(n) x P_k - sqrt(k) P_{k-1}) / sqrt(k+1)
  im->coeff.assign(N, Vec(N, Real(0)));
  im->coeff[0][0] = im->h0;
  for (int k = 0; k + 1 < N; ++k) {
    for (int j = 0; j <= k; ++j) im->coeff[k + 1][j + 1] += sqrt(n) * im->coeff[k][j];
    if (k >= 1)
      for (int j = 0; j < N; ++j) im->coeff[k + 1][j] -= sqrt(Real(k)) * im->coeff[k - 1][j];
    for (int j = 0; j < N; ++j) im->coeff[k + 1][j] /= sqrt(Real(k + 1));
  }

  if (r > 0) {
    // moments of e^{-n(x^2/2 - a x)} = e^{n a^2/2} e^{-n (x-a)^2/2}: mean a, variance 1/n
    Vec mom(2 * N);
    const Real norm = exp(n * a * a / 2) * sqrt(2 * boost::math::constants::pi<Real>() / n);
    Vec m(2 * N);
    m[0] = 1;
    if (2 * N > 1) m[1] = a;
    for (int k = 2; k < 2 * N; ++k) m[k] = a * m[k - 1] + Real(k - 1) / n * m[k - 2];
    for (int k = 0; k < 2 * N; ++k) mom[k] = norm * m[k];

    im->V.assign(N, Vec(r, Real(0)));
    Real worst = 0;
    for (int i = 0; i < N; ++i)
      for (int c = 0; c < r; ++c) {
        Real s = 0, mag = 0;
        for (int j = 0; j <= i; ++j)
          for (int k = 0; k <= c; ++k) {
            const Real t = im->coeff[i][j] * im->coeff[c][k] * mom[j + k];
            s += t;
            mag += abs(t);
          }
        im->V[i][c] = s;
        if (mag > 0) {
          const Real loss = log10_abs(mag) - log10_abs(s);
          if (loss > worst) worst = loss;
        }
      }
    Mat Vb(r, Vec(r));
    for (int i = 0; i < r; ++i)
      for (int c = 0; c < r; ++c) Vb[i][c] = im->V[m0 + i][c];
    im->Vbinv = invert(Vb);
    im->W.assign(m0, Vec(r, Real(0)));
    for (int l = 0; l < m0; ++l)
      for (int c = 0; c < r; ++c)
        for (int k = 0; k < r; ++k) im->W[l][c] += im->V[l][k] * im->Vbinv[k][c];
    const Real cond = inf_norm(Vb) * inf_norm(im->Vbinv);
    im->lost = static_cast<double>(worst + log10_abs(cond)) +
               std::max(0.0, static_cast<double>(log10_abs(inf_norm(im->W))));
  }
  if (p.digits - im->lost < 20.0) {
    const int suggest = static_cast<int>(std::ceil(im->lost)) + 30;
    throw PrecisionInsufficient("Gram factorization needs about " + std::to_string(suggest) +
                                    " digits",
                                suggest);
  }
  impl_ = std::move(im);
}

const MopParams& BiorthogonalSystem::params() const { return impl_->p; }

double BiorthogonalSystem::digits_lost() const { return impl_->lost; }

double BiorthogonalSystem::kernel(double x, double y) const {
  PrecisionGuard guard(impl_->p.digits);
  return static_cast<double>(impl_->kernel(Real(x), Real(y)));
}

std::string BiorthogonalSystem::kernel_decimal(double x, double y) const {
  PrecisionGuard guard(impl_->p.digits);
  return impl_->kernel(Real(x), Real(y)).str(impl_->p.digits, std::ios_base::scientific);
}

double BiorthogonalSystem::biorthogonality_residual() const {
  PrecisionGuard guard(impl_->p.digits);
  const auto& im = *impl_;
  const int N = im.p.n, r = im.p.r, m0 = N - r;
  if (r == 0) return 0.0;
  // <P_i, Q_j> = sum_l G[i][l] Ginv[l][j], G = [[I, V_top], [0, V_bot]] by rows i
  Real worst = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      Real s = 0;
      for (int l = 0; l < N; ++l) {
        const Real g = l < m0 ? Real(i == l ? 1 : 0) : im.V[i][l - m0];
        Real inv;
        if (l < m0)
          inv = j < m0 ? Real(l == j ? 1 : 0) : Real(-im.W[l][j - m0]);
        else
          inv = j < m0 ? Real(0) : im.Vbinv[l - m0][j - m0];
        s += g * inv;
      }
      const Real e = abs(s - (i == j ? 1 : 0));
      if (e > worst) worst = e;
    }
  return static_cast<double>(worst);
}

double BiorthogonalSystem::trace_error() const {
  PrecisionGuard guard(impl_->p.digits);
  const auto& im = *impl_;
  Real h;
  Real s = 0;
  for (const Real& t : im.nodes(h)) s += im.kernel(t, t);
  return static_cast<double>(abs(s * h - im.p.n));
}

double BiorthogonalSystem::reproducing_error(double x, double y) const {
  PrecisionGuard guard(impl_->p.digits);
  const auto& im = *impl_;
  const Vec fx = im.functions(Real(x));
  const Vec qy = im.duals(Real(y));
  Real h;
  Real s = 0;
  for (const Real& t : im.nodes(h)) s += im.from_vectors(fx, im.duals(t)) * im.from_vectors(im.functions(t), qy);
  return static_cast<double>(abs(s * h - im.from_vectors(fx, qy)));
}

double mop_kernel_finite_n(const BiorthogonalSystem& sys, double x, double y) { return sys.kernel(x, y); }

double fit_slope(const std::vector<double>& lx, const std::vector<double>& ly) {
  if (lx.size() != ly.size() || lx.size() < 2) throw DomainError("slope fit needs two or more points");
  const double m = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

ScalingTable verify_scaling_limit(const std::vector<int>& n_list, int r, double tau,
                                  const std::vector<std::pair<double, double>>& grid, int digits,
                                  double kernel_tol) {
  if (n_list.empty() || grid.empty()) throw DomainError("need at least one n and one grid point");
  const auto eq = equilibrium::solve_one_cut(equilibrium::Potential({0.0, 0.0, 0.5}));
  const double beta = eq.beta();
  const double c1 = equilibrium::c1_from_density(eq).value;
  const double a_c = equilibrium::critical_a(eq);

  ScalingTable t;
  const kernel::KernelParams kp{r, tau, kernel_tol, 1.0};
  std::vector<double> limits;
  for (const auto& [zx, zy] : grid) limits.push_back(kernel::r_airy_kernel(zx, zy, kp).value);

  std::vector<double> logn;
  std::vector<std::vector<double>> logerr(grid.size());
  std::vector<double> mean_log;
  for (int n : n_list) {
    const double nn = static_cast<double>(n);
    const double a = a_c + tau * c1 * std::pow(nn, -1.0 / 3.0);
    const BiorthogonalSystem sys({n, r, a, digits});
    const double scale = c1 * std::pow(nn, 2.0 / 3.0);
    const double delta = equilibrium::drift(eq, n, static_cast<double>(r) / nn);
    double acc = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto [zx, zy] = grid[g];
      const double x = beta + (zx + delta) / scale;
      const double y = beta + (zy + delta) / scale;
      const double kf = sys.kernel(x, y) / scale;
      const double rel = std::abs(kf - limits[g]) / std::abs(limits[g]);
      t.rows.push_back({n, zx, zy, kf, limits[g], rel});
      logerr[g].push_back(std::log(rel));
      acc += std::log(rel);
    }
    logn.push_back(std::log(nn));
    mean_log.push_back(acc / grid.size());
  }
  if (n_list.size() >= 2) {
    for (const auto& le : logerr) t.slopes.push_back(fit_slope(logn, le));
    t.mean_slope = fit_slope(logn, mean_log);
  }
  return t;
}

void write_csv(std::ostream& os, const ScalingTable& t) {
  os << "# schema=1\n";
  os << "n,zeta_x,zeta_y,K_finite,K_limit,rel_err\n";
  os << std::setprecision(17);
  for (const auto& r : t.rows)
    os << r.n << ',' << r.zeta_x << ',' << r.zeta_y << ',' << r.K_finite << ',' << r.K_limit << ','
       << r.rel_err << '\n';
}

}  // namespace rairy::mop
