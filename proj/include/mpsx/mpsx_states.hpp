/** @file mpsx_states.hpp
 * MPS-X families: amplitudes, translational invariance, boundary simplification
 * and assembly of the generalized canonical form.
 */
#ifndef MPSX_MPSX_STATES_HPP
#define MPSX_MPSX_STATES_HPP

#include <map>
#include <string>
#include <vector>

#include "mpsx/canonical_basis.hpp"
#include "mpsx/rls.hpp"
#include "mpsx/stability.hpp"

namespace mpsx {

struct MpsX {
  MatrixSet tensor;
  CMatrix X;

  MpsX() = default;
  MpsX(MatrixSet s, CMatrix x);
  int d() const { return tensor.d; }
  int D() const { return tensor.D; }
};

/// Amplitudes Tr[X A^{i1} ... A^{iN}], big-endian word order.
CVector generate_state(const MpsX& m, int N, long cap = 1L << 20);

/// Tr[X [a, b]] = 0 on every pair of algebra basis elements.
bool ti_check_general(const MpsX& m, double tol = kDefaultTol);

struct TiReport {
  bool is_ti = false;
  std::vector<cplx> beta;               // per label, zero where forced
  CMatrix x_tilde;                      // in the frame of the analyzed tensor
  CMatrix y;                            // b x b, Y_{j_t i_t} = beta_t
  std::vector<double> residual_i;       // per label
  double residual_ii = 0;
};

/// Boundary conditions against the structured basis of Alg(A); `m` is in the frame of `basis`'s input.
TiReport simplify_boundary(const MpsX& m, const StructuredBasis& basis, const GammaTensor& g,
                           double tol = kDefaultTol);

struct GcfResult {
  StabilityReport stability;
  int block_length = 1;                 // physical sites per gCF site
  MpsX blocked;
  MatrixCF cf;
  GammaTensor gamma;
  TiReport ti;
  AlgebraicRls backbone;                // weights in the parameters b<label>
  AlgebraicRls backbone_values;         // weights with the extracted betas
  std::vector<std::vector<CMatrix>> upper;  // upper[x][e], embedded in the class space
  BlockInjectivity injectivity;
  MpsX composed;                        // backbone family contracted with the upper MPO
  bool gamma_invariant = false;
  std::vector<double> verify_residuals; // relative max-norm error for N = 1, 2, ...

  std::map<std::string, cplx> beta_values() const;
};

GcfResult assemble_gcf(const MpsX& m, const Options& opt = {});

}  // namespace mpsx

#endif
