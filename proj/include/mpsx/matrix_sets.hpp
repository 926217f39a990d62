/** @file matrix_sets.hpp
 * MPS tensors as finite matrix sets; fixed-length spans and generated algebras.
 */
#ifndef MPSX_MATRIX_SETS_HPP
#define MPSX_MATRIX_SETS_HPP

#include <vector>

#include "mpsx/numerics.hpp"
#include "mpsx/options.hpp"

namespace mpsx {

struct MatrixSet {
  int d = 0;
  int D = 0;
  std::vector<CMatrix> mats;

  MatrixSet() = default;
  explicit MatrixSet(std::vector<CMatrix> m);
  const CMatrix& operator[](int i) const { return mats[i]; }
  MatrixSet conjugated(const CMatrix& p, const CMatrix& pinv) const;
};

struct MatSpan {
  int D = 0;
  int length = 0;
  VectorSpace space;  // ambient dimension D*D

  int dim() const { return space.dim(); }
  CMatrix element(int k) const { return unvec(space.vec(k), D, D); }
  std::vector<CMatrix> elements() const;
};

struct AlgebraRep {
  int D = 0;
  VectorSpace space;
  int r_alg = 0;

  int dim() const { return space.dim(); }
  CMatrix element(int k) const { return unvec(space.vec(k), D, D); }
  std::vector<CMatrix> elements() const;
};

/// Orthonormalized span of a list of D x D matrices.
VectorSpace matrix_span(const std::vector<CMatrix>& mats, int D, double tol = kDefaultTol);
/// span{a b : a in basis(x), b in basis(y)}
VectorSpace product_span(const VectorSpace& x, const VectorSpace& y, int D, double tol = kDefaultTol);

MatSpan span_fixed_length(const MatrixSet& s, int ell, double tol = kDefaultTol);
AlgebraRep generate_algebra(const MatrixSet& s, double tol = kDefaultTol);
/// Algebra generated by an arbitrary list of matrices (used on span bases).
AlgebraRep generate_algebra(const std::vector<CMatrix>& gens, int D, double tol = kDefaultTol);

bool contains_identity0(const MatrixSet& s, int ell, const CMatrix& id0, double tol = kDefaultTol);

/// All d^ell products A^{i1}...A^{iell}; word index is big-endian in i1.
MatrixSet block_physical(const MatrixSet& s, int ell, long cap = 4096);

CMatrix word_product(const MatrixSet& s, const std::vector<int>& word);

}  // namespace mpsx

#endif
