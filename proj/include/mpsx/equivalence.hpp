/** @file equivalence.hpp
 * Exact equivalence of MPS-X families: weighted automata, negligible blocks,
 * physical subspaces, reduced pairs and the stacking relation between two matrix-CFs.
 */
#ifndef MPSX_EQUIVALENCE_HPP
#define MPSX_EQUIVALENCE_HPP

#include <string>
#include <utility>
#include <vector>

#include "mpsx/mpsx_states.hpp"

namespace mpsx {

struct Wfa {
  int d = 0;
  int n = 0;
  CMatrix initial;                  // 1 x n
  std::vector<CMatrix> transition;  // d matrices n x n
  CMatrix final_;                   // n x 1

  cplx weight(const std::vector<int>& word) const;
};

/// Linear representation with n = D^2: state vec(X A^{w1} ... A^{wk}), final functional the trace.
Wfa to_wfa(const MpsX& m, std::uint64_t seed = 0xC0FFEE);

struct WfaComparison {
  bool equal = true;
  std::vector<int> word;  // first distinguishing word (BFS by length, then lexicographic)
  int explored = 0;       // dimension of the reachable space of the difference automaton
};

/// Compares weights of all nonempty words.
WfaComparison wfa_compare(const Wfa& a, const Wfa& b, double tol = 1e-8);
bool wfa_equal(const Wfa& a, const Wfa& b, double tol = 1e-8);
std::string word_string(const std::vector<int>& word, int d);

/// Labels whose upper content can be zeroed without changing the family. `cf` must be the matrix-CF of m.tensor.
std::vector<int> negligible_blocks(const MpsX& m, const MatrixCF& cf, double tol = 1e-8);
/// The family with the given labels' upper contents zeroed, in the structured frame of `cf`.
MpsX zero_blocks(const MpsX& m, const MatrixCF& cf, const std::vector<int>& labels);

/// span{ (Tr[Y A^i])_i : Y } as a subspace of C^d.
VectorSpace physical_subspace(const MatrixSet& s, double tol = kDefaultTol);

struct ReducedPair {
  MpsX a, b;
  VectorSpace common;  // V_A intersected with V_B
  CMatrix projector;   // d x d
};

/// Projects both physical legs onto V_A and V_B's intersection. Requires wfa_equal(a, b).
ReducedPair reduce_pair(const MpsX& a, const MpsX& b, double tol = kDefaultTol);

/// Coordinates are label contents entry by entry; a 1 x 1 label is its own coordinate.
struct GaugeRelation {
  std::vector<std::string> c_labels;  // coordinates of A, then coordinates only B needs
  std::vector<std::string> b_labels;  // coordinates of B
  int n_extra = 0;
  std::vector<int> pi;                // B class -> A class
  std::vector<cplx> alpha;            // per B class: diagonal block proportionality
  std::vector<CMatrix> z;             // per B class: B_rep = alpha Z A_rep Z^-1
  CMatrix p_b;                        // n_C x n_B; column s is P_B |s>, so B_up = P_B^T C_up
  double residual = 0;                // max error of B_up rebuilt from C_up

  bool reduced() const { return n_extra == 0; }
};

/// Relates the length-ell span matrix-CFs of a and b through the stacked tensor A (+) B.
GaugeRelation stack_and_relate(const MpsX& a, const MpsX& b, int ell = 1, const Options& opt = {});

}  // namespace mpsx

#endif
