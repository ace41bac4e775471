#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "rairy/equilibrium.hpp"

namespace rairy::ensemble {

struct EnsembleSpec {
  int n = 400;
  int r = 0;
  double a = 1.0;
  std::uint64_t seed = 0;
};

void validate(const EnsembleSpec& s);

struct EdgeSample {
  std::vector<double> eigenvalues;  // ascending, length n
  std::vector<double> zeta_coords;  // top eigenvalues rescaled, largest first
  std::uint64_t draw_index = 0;
};

// Per-draw normal stream: mt19937_64 seeded from (seed, draw_index), Box-Muller on 53-bit uniforms.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t draw_index);
  double operator()();

 private:
  double uniform();
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// M = G + diag(a,..,a,0,..,0): diagonal N(A_ii, 1/n), off-diagonal real and imaginary parts N(0, 1/(2n)).
Eigen::MatrixXcd sample_matrix(const EnsembleSpec& spec, std::uint64_t draw_index);
EdgeSample sample_spiked_gue(const EnsembleSpec& spec, std::uint64_t draw_index = 0);

// Householder reduction to real tridiagonal form, then implicit-shift QL; ascending.
std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& H);

struct EdgeScaling {
  double beta;
  double c1;
  double delta;  // c1 beta_dot kappa n^{2/3}, kappa = r/n
  int n;
};
EdgeScaling edge_scaling(const equilibrium::EquilibriumData& eq, const EnsembleSpec& spec);
// zeta = c1 n^{2/3} (lambda - beta) - delta for the top k eigenvalues, largest first.
std::vector<double> edge_rescale(const EdgeSample& s, const EdgeScaling& sc, int k = 10);

// draws with indices first..first+count-1; order of the result follows the index.
std::vector<EdgeSample> sample_many(const EnsembleSpec& spec, int count, std::uint64_t first = 0,
                                    unsigned threads = 0);

struct EmpiricalCdf {
  std::vector<double> values;  // sorted
  double dkw_epsilon;          // band half-width at the given confidence
  double operator()(double x) const;
};
EmpiricalCdf empirical_cdf(std::vector<double> values, double confidence = 0.99);
// Top rescaled eigenvalue of each sample.
EmpiricalCdf largest_eig_cdf(const std::vector<EdgeSample>& samples, double confidence = 0.99);

double ks_distance(const EmpiricalCdf& cdf, const std::function<double(double)>& F);

// Linear interpolation in a tabulated CDF; constant beyond the grid ends, values clamped to [0, 1].
std::function<double(double)> interpolate_cdf(std::vector<double> s, std::vector<double> F);

// CSV rows: draw_index, then the ten largest eigenvalues.
void write_draws_csv(std::ostream& os, const std::vector<EdgeSample>& samples);

}  // namespace rairy::ensemble
