/** @file canonical_basis.hpp
 * Structured basis of an algebra or a fixed-length span: diagonal classes,
 * free off-diagonal blocks, coefficients k_{ij;e}, the structure constants
 * Gamma, the matrix-CF factorization and block-injectivity certificates.
 */
#ifndef MPSX_CANONICAL_BASIS_HPP
#define MPSX_CANONICAL_BASIS_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mpsx/block_structure.hpp"

namespace mpsx {

enum class BasisMode { Algebra, Span };

struct Label {
  std::string name;
  bool diagonal = false;
  int cls = -1;       // diagonal labels: the class index
  int r1 = -1;        // sector classes, -1 for the vanishing class
  int r2 = -1;
  int i0 = 0, j0 = 0; // first-occurrence block
  int rows = 0, cols = 0;
};

struct StructuredBasis {
  BasisMode mode = BasisMode::Algebra;
  int ell = 0;  // span length (span mode)
  int D = 0;
  std::vector<int> sizes, offsets;
  CMatrix P, Pinv;                 // structured = P * input * Pinv
  std::vector<int> block_class;    // per block, -1 for the vanishing class
  std::vector<cplx> block_mu;      // diagonal block = mu * representative content
  int n_inf = 0;                   // number of diagonal classes
  std::vector<Label> labels;       // diagonal labels first, then off-diagonal ones in order of appearance
  std::vector<std::vector<std::vector<cplx>>> k;  // k[i][j][e]
  std::map<std::pair<int, int>, long> m;           // isolatability length per off-diagonal block
  std::vector<CMatrix> elements;   // basis of the subspace in the structured gauge

  int b() const { return static_cast<int>(sizes.size()); }
  int n_labels() const { return static_cast<int>(labels.size()); }
  CMatrix block(const CMatrix& a, int i, int j) const { return a.block(offsets[i], offsets[j], sizes[i], sizes[j]); }
  /// Contents of every label, read at first occurrences. `a` is in the structured gauge.
  std::vector<CMatrix> decompose(const CMatrix& a) const;
  /// sum_e [content_e]_e
  CMatrix reconstruct(const std::vector<CMatrix>& contents) const;
  /// The b x b matrix of k_{ij;e}.
  CMatrix a_low(int e) const;
  /// Total number of scalar coordinates sum_e rows_e * cols_e.
  int n_coords() const;
};

/// Structured basis of Alg(gauged) or of the length-ell span of the analyzed tensor.
StructuredBasis build_structured_basis(const StructureAnalysis& sa, BasisMode mode, int ell = 1,
                                       const Options& opt = {});

/// Padded identity (zero on vanishing diagonal blocks) in the frame of the analyzed tensor.
CMatrix identity0(const StructuredBasis& basis);

struct GammaTensor {
  int n = 0;
  std::vector<cplx> g;  // g[(p*n + q)*n + r] = Gamma^{pq}_r
  cplx operator()(int p, int q, int r) const { return g[(static_cast<size_t>(p) * n + q) * n + r]; }
  cplx& operator()(int p, int q, int r) { return g[(static_cast<size_t>(p) * n + q) * n + r]; }
  double associativity_residual() const;
};

GammaTensor gamma_tensor(const StructuredBasis& basis, double tol = kDefaultTol);

struct GammaChecks {
  double p1 = 0;  // diagonal labels are orthogonal idempotents
  double p2 = 0;  // products of two off-diagonal labels have no diagonal component
  double p3 = 0;  // nonzero entries respect sectors
  double assoc = 0;
};
GammaChecks check_gamma(const StructuredBasis& basis, const GammaTensor& gamma);

struct MatrixCF {
  StructuredBasis basis;
  MatrixSet gauged;                          // letters in the structured gauge
  MatrixSet a_low;                           // one b x b matrix per label
  std::vector<std::vector<CMatrix>> a_up;    // a_up[x][e]
  int ell = 1;                               // physical blocking used to build the letters
  double residual = 0;                       // reconstruction residual
};

/// Decomposes the letters (in the frame of the analyzed tensor) over the structured basis.
MatrixCF matrix_cf(const MatrixSet& s, const StructuredBasis& basis, int ell = 1, double tol = kDefaultTol);

struct BlockInjectivity {
  long length = kInfinite;
  double certificate_residual = 0;  // max |L M - I| for the constructed left inverse
};

/// Smallest l <= l_max whose blocked upper tensor is injective on the free-block contents.
BlockInjectivity block_injectivity_length(const MatrixCF& cf, int l_max, long cap = 4096, double tol = kDefaultTol);

}  // namespace mpsx

#endif
