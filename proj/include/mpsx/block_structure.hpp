/** @file block_structure.hpp
 * Simultaneous block-upper-triangularization, period detection and the
 * classification of irreducible diagonal blocks into equivalence classes.
 */
#ifndef MPSX_BLOCK_STRUCTURE_HPP
#define MPSX_BLOCK_STRUCTURE_HPP

#include <random>
#include <vector>

#include "mpsx/matrix_sets.hpp"

namespace mpsx {

/// Marker for an unbounded or unreached length/order.
constexpr long kInfinite = -1;

struct BlockPartition {
  int D = 0;
  std::vector<int> sizes;
  std::vector<int> offsets;
  CMatrix P;     // gauged A = P A P^-1
  CMatrix Pinv;
  std::vector<int> cls;       // class index per block, -1 for the vanishing class
  std::vector<int> rep;       // representative block of the class, -1 for the vanishing class
  std::vector<cplx> mu;       // A_kk = mu_k Z_k A_rr Z_k^-1 with r = rep[k]
  std::vector<CMatrix> Z;
  int n_classes = 0;
  int p = 1;
  long q = 1;                 // kInfinite when no finite order exists below q_max
  long L0_diag = kInfinite;   // largest length needed for a block identity to enter the block span
  long LBI_diag = kInfinite;  // largest length needed for a block span to become the full matrix space

  int b() const { return static_cast<int>(sizes.size()); }
  CMatrix block(const CMatrix& m, int i, int j) const { return m.block(offsets[i], offsets[j], sizes[i], sizes[j]); }
  /// Block-index of a row/column index.
  int block_of(int index) const;
};

struct Triangularized {
  BlockPartition part;
  MatrixSet gauged;  // P A^i P^-1
};

/// Block-upper-triangular form with irreducible diagonal blocks (certified by Burnside).
Triangularized triangularize(const MatrixSet& s, const Options& opt = {});

/// lcm over diagonal blocks of the number of peripheral eigenvalues of the block transfer operators.
int detect_period(const Triangularized& t, double tol = kDefaultTol);

/// Fills classes, mu, Z and q. `t` must have trivial periods (p = 1 after blocking).
void classify_diagonal(Triangularized& t, const Options& opt = {});

/// Relation C^x = mu Z B^x Z^-1 between two irreducible blocks, found from the mixed transfer operator.
bool relate_blocks(const std::vector<CMatrix>& b, const std::vector<CMatrix>& c, cplx& mu, CMatrix& z,
                   double tol = kDefaultTol);

struct StructureAnalysis {
  int p = 1;
  MatrixSet effective;  // the tensor itself when p = 1, else a basis of the length-p span
  Triangularized tri;   // triangularized and classified effective tensor
};

/// triangularize, detect the period, pass to the period-blocked span and classify.
StructureAnalysis analyze_structure(const MatrixSet& s, const Options& opt = {});

/// Orthonormal basis of a minimal nonzero invariant subspace of the generated algebra.
CMatrix minimal_invariant_subspace(const std::vector<CMatrix>& gens, int n, std::mt19937_64& rng, double tol);

}  // namespace mpsx

#endif
