/** @file stability.hpp
 * Stability of a matrix set under blocking: root-of-unity order q, the
 * padded identity search and the observed stabilization length.
 */
#ifndef MPSX_STABILITY_HPP
#define MPSX_STABILITY_HPP

#include <string>
#include <vector>

#include "mpsx/canonical_basis.hpp"

namespace mpsx {

enum class StabilityVerdict { Stable, NotStable, Undecided };

const char* verdict_name(StabilityVerdict v);

struct StabilityReport {
  StabilityVerdict verdict = StabilityVerdict::Undecided;
  int p = 1;
  long q = 1;
  int b = 0;
  long identity0_length = kInfinite;  // in units of p*q sites
  long identity0_cap = 0;
  long stable_multiple = kInfinite;   // smallest s with A^(s l0) = Alg, in units of l0*p*q
  long stable_length = kInfinite;     // physical length s * l0 * p * q
  int r_alg = 0;
  int alg_dim = 0;
  std::vector<int> probed_dims;       // dim A^(s l0) for s = 1, 2, ...
  std::string witness;                // "q", "identity0-absent" or empty
  cplx witness_mu = 0;                // offending constant for the "q" witness
  std::string bound_stab;             // p q L_span b 2^b with L_span <= 45 b^2 D^3 2^(b^2)
  long bound_lbi = 0;                 // D^2
  long bound_ralg = 0;                // D^2

  bool stable() const { return verdict == StabilityVerdict::Stable; }
};

StabilityReport check_stability(const MatrixSet& s, const Options& opt = {});

/// Value of the worst-case stabilization bound, or the formula when it overflows 64 bits.
std::string stabilization_bound(int p, long q, int b, int D);

}  // namespace mpsx

#endif
