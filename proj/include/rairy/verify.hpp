#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rairy::verify {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Identity checks that need no external oracle.
CheckResult check_jumps();                  // A_+ - A_- J on the four rays, r = 1..4, tau = -1, 0, 1
CheckResult check_concomitant();            // pairing of C_j and Chat_i solutions is delta_ij, zeta-independent
CheckResult check_wronskian_inverse();      // chihat F chi = I with the pairing matrix F
CheckResult check_eta0();                   // eta_0(0) = 1 and the two representations agree
CheckResult check_r0_reduction();           // r = 0 kernel against the classical Airy kernel (Boost Airy)
CheckResult check_adler();                  // Brownian-motion form equals the double contour form
CheckResult check_expansion_slopes();       // truncation error slopes of the large-zeta expansions
CheckResult check_transfer_consistency();   // transfer integrals against Wronskian products

enum class Suite { Fast, Full };
// Fast: jumps, concomitant, eta_0, r = 0 reduction, Adler equivalence, transfer consistency.
// Full adds the expansion slopes and the Wronskian inverse with the pairing matrix F.
std::vector<CheckResult> run_suite(Suite s);

void print_table(std::ostream& os, const std::vector<CheckResult>& rows);

}  // namespace rairy::verify
