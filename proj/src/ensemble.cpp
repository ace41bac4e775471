#include "rairy/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <Eigen/Dense>

namespace rairy::ensemble {

void validate(const EnsembleSpec& s) {
  if (s.n < 2) throw DomainError("n must be >= 2");
  if (s.r < 0 || s.r > s.n) throw DomainError("r must lie in [0, n]");
  if (!std::isfinite(s.a)) throw DomainError("a must be finite");
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t draw_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(draw_index),
                    static_cast<std::uint32_t>(draw_index >> 32)};
  engine_.seed(seq);
}

double NormalStream::uniform() {
  // (0, 1), never 0 so the log is finite
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double NormalStream::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform(), u2 = uniform();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  spare_ = rad * std::sin(2.0 * pi * u2);
  has_spare_ = true;
  return rad * std::cos(2.0 * pi * u2);
}

Eigen::MatrixXcd sample_matrix(const EnsembleSpec& spec, std::uint64_t draw_index) {
  validate(spec);
  const int n = spec.n;
  NormalStream z(spec.seed, draw_index);
  const double sd_diag = std::sqrt(1.0 / n), sd_off = std::sqrt(0.5 / n);
  Eigen::MatrixXcd M(n, n);
  for (int j = 0; j < n; ++j) {
    M(j, j) = cplx{(j < spec.r ? spec.a : 0.0) + sd_diag * z(), 0.0};
    for (int i = j + 1; i < n; ++i) {
      const double re = sd_off * z();
      const double im = sd_off * z();
      M(i, j) = cplx{re, im};
      M(j, i) = cplx{re, -im};
    }
  }
  return M;
}

EdgeSample sample_spiked_gue(const EnsembleSpec& spec, std::uint64_t draw_index) {
  EdgeSample s;
  s.eigenvalues = hermitian_eigenvalues(sample_matrix(spec, draw_index));
  s.draw_index = draw_index;
  return s;
}

std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& H) {
  const int n = static_cast<int>(H.rows());
  if (H.cols() != n) throw DomainError("matrix must be square");
  if (n == 0) return {};
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw DomainError("matrix is not Hermitian");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalFailure("eigenvalue iteration did not converge");
  const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending
  return {ev.data(), ev.data() + n};
}

EdgeScaling edge_scaling(const equilibrium::EquilibriumData& eq, const EnsembleSpec& spec) {
  validate(spec);
  const double kappa = static_cast<double>(spec.r) / spec.n;
  return {eq.beta(), equilibrium::c1_from_density(eq).value, equilibrium::drift(eq, spec.n, kappa),
          spec.n};
}

std::vector<double> edge_rescale(const EdgeSample& s, const EdgeScaling& sc, int k) {
  const double scale = sc.c1 * std::pow(static_cast<double>(sc.n), 2.0 / 3.0);
  std::vector<double> out;
  const int m = std::min<int>(k, static_cast<int>(s.eigenvalues.size()));
  for (int i = 0; i < m; ++i) {
    const double lam = s.eigenvalues[s.eigenvalues.size() - 1 - i];
    out.push_back(scale * (lam - sc.beta) - sc.delta);
  }
  return out;
}

std::vector<EdgeSample> sample_many(const EnsembleSpec& spec, int count, std::uint64_t first,
                                    unsigned threads) {
  validate(spec);
  if (count < 0) throw DomainError("count must be >= 0");
  std::vector<EdgeSample> out(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  auto work = [&](unsigned t) {
    for (int i = static_cast<int>(t); i < count; i += static_cast<int>(threads))
      out[i] = sample_spiked_gue(spec, first + i);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  return out;
}

double EmpiricalCdf::operator()(double x) const {
  const auto it = std::upper_bound(values.begin(), values.end(), x);
  return static_cast<double>(it - values.begin()) / values.size();
}

EmpiricalCdf empirical_cdf(std::vector<double> values, double confidence) {
  if (values.empty()) throw DomainError("empirical CDF of zero samples");
  if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("confidence must lie in (0, 1)");
  std::sort(values.begin(), values.end());
  const double eps = std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * values.size()));
  return {std::move(values), eps};
}

EmpiricalCdf largest_eig_cdf(const std::vector<EdgeSample>& samples, double confidence) {
  std::vector<double> top;
  top.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.zeta_coords.empty()) throw PreconditionError("sample has not been rescaled");
    top.push_back(s.zeta_coords.front());
  }
  return empirical_cdf(std::move(top), confidence);
}

double ks_distance(const EmpiricalCdf& cdf, const std::function<double(double)>& F) {
  const double N = static_cast<double>(cdf.values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < cdf.values.size(); ++i) {
    const double f = F(cdf.values[i]);
    d = std::max({d, std::abs((i + 1) / N - f), std::abs(i / N - f)});
  }
  return d;
}

std::function<double(double)> interpolate_cdf(std::vector<double> s, std::vector<double> F) {
  if (s.size() != F.size() || s.size() < 2) throw DomainError("need at least two tabulated points");
  return [s = std::move(s), F = std::move(F)](double x) {
    if (x <= s.front()) return std::clamp(F.front(), 0.0, 1.0);
    if (x >= s.back()) return std::clamp(F.back(), 0.0, 1.0);
    const auto it = std::upper_bound(s.begin(), s.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - s.begin());
    const double t = (x - s[j - 1]) / (s[j] - s[j - 1]);
    return std::clamp((1.0 - t) * F[j - 1] + t * F[j], 0.0, 1.0);
  };
}

void write_draws_csv(std::ostream& os, const std::vector<EdgeSample>& samples) {
  os << "# schema=1\n";
  os << "draw_index";
  for (int k = 9; k >= 0; --k) os << ",lambda_n" << (k ? "-" + std::to_string(k) : std::string{});
  os << '\n';
  os.precision(17);
  for (const auto& s : samples) {
    os << s.draw_index;
    const std::size_t n = s.eigenvalues.size();
    for (std::size_t k = std::min<std::size_t>(10, n); k-- > 0;) os << ',' << s.eigenvalues[n - 1 - k];
    os << '\n';
  }
}

}  // namespace rairy::ensemble
