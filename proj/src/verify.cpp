#include "rairy/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "rairy/genairy.hpp"
#include "rairy/kernel.hpp"
#include "rairy/mop_oracle.hpp"

namespace rairy::verify {

namespace {

template <class F>
CheckResult timed(F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r = body();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

CheckResult make(std::string name, double measured, double threshold, std::string detail = {}) {
  return {std::move(name), measured, threshold, measured < threshold, std::move(detail), 0.0};
}

double inf_norm(const genairy::Matrix3c& M) {
  double best = 0.0;
  for (int i = 0; i < 3; ++i) best = std::max(best, M.row(i).cwiseAbs().sum());
  return best;
}

}  // namespace

CheckResult check_jumps() {
  return timed([] {
    const double angles[4] = {0.0, 2.0 * pi / 3.0, pi, -2.0 * pi / 3.0};
    double worst = 0.0;
    for (int r = 1; r <= 4; ++r)
      for (double tau : {-1.0, 0.0, 1.0})
        for (int g = 1; g <= 4; ++g)
          for (double rad : {0.7, 2.5})
            worst = std::max(worst, genairy::check_jump(g, std::polar(rad, angles[g - 1]), r, tau));
    return make("jump conditions", worst, 1e-7, "max row-sum residual over 96 (r, tau, point) cases");
  });
}

CheckResult check_concomitant() {
  return timed([] {
    double id_err = 0.0, z_err = 0.0;
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j) {
        const cplx b1 = kernel::concomitant(i, j, 2, 0.3, 0.5);
        const cplx b2 = kernel::concomitant(i, j, 2, 0.3, 2.0);
        id_err = std::max(id_err, std::abs(b1 - (i == j ? 1.0 : 0.0)));
        z_err = std::max(z_err, std::abs(b1 - b2));
      }
    CheckResult r = make("concomitant pairing", id_err, 1e-7);
    std::ostringstream d;
    d << "zeta 0.5 vs 2.0 differ by " << std::setprecision(3) << z_err << " (limit 1e-8)";
    r.detail = d.str();
    r.pass = id_err < 1e-7 && z_err < 1e-8;
    return r;
  });
}

CheckResult check_wronskian_inverse() {
  return timed([] {
    struct Triple {
      int r;
      double tau;
      cplx zeta;
    };
    const Triple cases[3] = {{2, 0.3, 0.5}, {3, -0.5, cplx{1.0, 0.5}}, {2, 1.0, -1.5}};
    double with_pairing = 0.0, concomitant = 0.0;
    for (const auto& c : cases) {
      const auto X = genairy::wronskian_chi(c.r - 1, c.zeta, c.tau);
      const auto D = genairy::dual_wronskian(c.r - 1, c.zeta, c.tau);
      const genairy::Matrix3c Id = genairy::Matrix3c::Identity();
      with_pairing = std::max(with_pairing, inf_norm(D * genairy::pairing_matrix(c.zeta, c.tau) * X - Id));
      concomitant = std::max(concomitant, inf_norm(D * genairy::concomitant_matrix(c.zeta, c.tau) * X - Id));
    }
    std::ostringstream d;
    d << "with the sign-flipped matrix the residual is " << std::setprecision(3) << concomitant;
    return make("wronskian inverse", with_pairing, 1e-7, d.str());
  });
}

CheckResult check_eta0() {
  return timed([] {
    const double at0 = std::abs(genairy::eta(0, 0.0) - 1.0);
    double diff = 0.0;
    for (double tau : {-1.0, -0.5, 0.0, 0.5, 1.0})
      diff = std::max(diff, std::abs(genairy::eta(0, tau) - genairy::eta_real_axis(0, tau)));
    CheckResult r = make("eta_0 identities", diff, 1e-7);
    std::ostringstream d;
    d << "|eta_0(0) - 1| = " << std::setprecision(3) << at0 << " (limit 1e-8)";
    r.detail = d.str();
    r.pass = at0 < 1e-8 && diff < 1e-7;
    return r;
  });
}

CheckResult check_r0_reduction() {
  return timed([] {
    double worst = 0.0;
    const kernel::KernelParams p{0, 0.0, 1e-10, 1.0};
    for (int i = -4; i <= 4; ++i)
      for (int j = -4; j <= 4; ++j)
        worst = std::max(worst, std::abs(kernel::r_airy_kernel(i, j, p).value -
                                         kernel::airy_kernel_classical(i, j)));
    return make("r=0 reduction", worst, 1e-7, "9x9 grid on [-4,4]^2");
  });
}

CheckResult check_adler() {
  return timed([] {
    double worst = 0.0;
    for (int r : {1, 2})
      for (double tau : {-0.5, 0.5}) {
        const kernel::KernelParams p{r, tau, 1e-10, 1.0};
        for (int i = -2; i <= 2; ++i)
          for (int j = -2; j <= 2; ++j)
            worst = std::max(worst, std::abs(kernel::adler_kernel(i, j, p).value -
                                             kernel::r_airy_kernel(i, j, p).value));
      }
    return make("Brownian-motion kernel", worst, 1e-6, "5x5 grid on [-2,2]^2, r in {1,2}, tau = +-0.5");
  });
}

CheckResult check_expansion_slopes() {
  return timed([] {
    const double zs[] = {15, 20, 25, 30, 40, 50, 60};
    double worst_excess = -1e300;
    int failed = 0, total = 0;
    std::ostringstream fails;
    for (int r : {1, 2})
      for (double tau : {-0.5, 0.5})
        for (int i = 1; i <= 3; ++i)
          for (int j = 1; j <= 3; ++j) {
            const int terms = genairy::expansion_info(i, j, r, tau, 15.0, 1).terms_available;
            std::vector<double> lx, ly;
            for (double z : zs) {
              const auto A = genairy::airy_matrix(z, r, tau, genairy::Region::I);
              const auto info = genairy::expansion_info(i, j, r, tau, z, terms);
              const double e = std::abs(A.entries(i - 1, j - 1) -
                                        genairy::asymptotic_entry(i, j, r, tau, z, terms)) /
                               std::abs(info.leading);
              lx.push_back(std::log(z));
              ly.push_back(std::log(e));
            }
            const double slope = mop::fit_slope(lx, ly);
            const double need = -genairy::expansion_info(i, j, r, tau, 20.0, terms).next_order + 0.3;
            const double excess = slope - need;
            worst_excess = std::max(worst_excess, excess);
            ++total;
            if (excess > 0.0) {
              ++failed;
              fails << " r=" << r << " tau=" << tau << " (" << i << ',' << j << ") slope "
                    << std::setprecision(4) << slope << " > " << need << ';';
            }
          }
    std::ostringstream d;
    d << failed << " of " << total << " entries miss the bound;" << fails.str();
    CheckResult res{"expansion slopes", worst_excess, 0.0, failed == 0, d.str(), 0.0};
    return res;
  });
}

CheckResult check_transfer_consistency() {
  return timed([] {
    double worst = 0.0;
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j) {
        if (i == j) continue;
        worst = std::max(worst, std::abs(kernel::chi_transfer(i, j, 0.7, -0.3, 2, 0.5) -
                                         kernel::chi_transfer_wronskian(i, j, 0.7, -0.3, 2, 0.5)));
      }
    return make("transfer integrals", worst, 1e-8, "off-diagonal entries at r=2, tau=0.5");
  });
}

std::vector<CheckResult> run_suite(Suite s) {
  std::vector<CheckResult> out;
  out.push_back(check_jumps());
  out.push_back(check_concomitant());
  out.push_back(check_eta0());
  out.push_back(check_r0_reduction());
  out.push_back(check_adler());
  out.push_back(check_transfer_consistency());
  if (s == Suite::Full) {
    out.push_back(check_expansion_slopes());
    out.push_back(check_wronskian_inverse());
  }
  return out;
}

void print_table(std::ostream& os, const std::vector<CheckResult>& rows) {
  os << std::left << std::setw(26) << "check" << std::setw(6) << "pass" << std::setw(13) << "measured"
     << std::setw(11) << "threshold" << std::setw(9) << "seconds" << "detail\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(26) << r.name << std::setw(6) << (r.pass ? "PASS" : "FAIL")
       << std::setw(13) << std::setprecision(3) << std::scientific << r.measured << std::setw(11)
       << r.threshold << std::setw(9) << std::fixed << std::setprecision(2) << r.seconds
       << std::defaultfloat << r.detail << '\n';
  }
}

}  // namespace rairy::verify
