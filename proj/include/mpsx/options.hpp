/** @file options.hpp
 * Tolerances and practical caps. Defaults are the values used by the CLI.
 */
#ifndef MPSX_OPTIONS_HPP
#define MPSX_OPTIONS_HPP

#include <cstdint>

namespace mpsx {

struct Options {
  double tol = 1e-9;
  long cap_phys = 4096;         // largest d^l materialized by physical blocking
  int cap_len = 64;             // largest probed length in membership searches
  std::uint64_t seed = 0xC0FFEE;
  int q_max = 720;
  int m_ell_max = 16;           // isolatability probe range
  int verify_n = 6;
  long amp_cap = 1L << 20;      // largest number of amplitudes generated
};

}  // namespace mpsx

#endif
