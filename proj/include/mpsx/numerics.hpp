/** @file numerics.hpp
 * Dense complex linear algebra helpers shared by the whole library.
 * Matrices are Eigen objects; every vectorization in the library is row-major.
 */
#ifndef MPSX_NUMERICS_HPP
#define MPSX_NUMERICS_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mpsx {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

constexpr double kDefaultTol = 1e-9;

enum class ErrorKind {
  InvalidInput,
  CapExceeded,
  StructureUncertain,
  InvalidMode,
  InconsistentBasis,
  InvalidALow,
  NotStable,
  NotTI,
  NotEquivalent,
  RelationNotFound,
  SyntaxError,
  SectorConflict
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Orthonormal basis of a subspace of C^n. Basis vectors are the columns of `basis`.
struct VectorSpace {
  int ambient_dim = 0;
  CMatrix basis;  // ambient_dim x dim
  double tol = kDefaultTol;

  int dim() const { return static_cast<int>(basis.cols()); }
  CVector vec(int k) const { return basis.col(k); }
  CMatrix projector() const { return basis * basis.adjoint(); }
};

// row-major vectorization and its inverse
CVector vec(const CMatrix& m);
CMatrix unvec(const CVector& v, int rows, int cols);

bool all_finite(const CMatrix& m);

/// Number of singular values above tol * largest (or tol when all vanish).
int rank(const CMatrix& m, double tol = kDefaultTol);

VectorSpace orthonormalize(const std::vector<CVector>& vectors, double tol = kDefaultTol);
/// Columns of `cols` are the input vectors.
VectorSpace orthonormalize_columns(const CMatrix& cols, int ambient_dim, double tol = kDefaultTol);
/// Span of the already-orthonormal columns of `q`.
VectorSpace space_from_orthonormal(const CMatrix& q, double tol = kDefaultTol);

bool contains(const VectorSpace& space, const CVector& v);
double residual(const VectorSpace& space, const CVector& v);
VectorSpace intersect(const VectorSpace& a, const VectorSpace& b);
VectorSpace orthogonal_complement(const VectorSpace& a);
/// Extends `space` by vectors (Gram-Schmidt, drops dependent ones). Returns number added.
int extend(VectorSpace& space, const std::vector<CVector>& vectors, double scale);

/// Orthonormal basis of the right nullspace {x : m x = 0}.
CMatrix nullspace(const CMatrix& m, double tol = kDefaultTol);
/// Minimum-norm least-squares solution of a x = b.
CMatrix lstsq(const CMatrix& a, const CMatrix& b, double tol = kDefaultTol);

/// Multiply the column by a phase so its first entry of maximal modulus is real positive.
void fix_phase(Eigen::Ref<CVector> v);
/// Deterministic basis for span(q): Gram-Schmidt over projected unit vectors e_0, e_1, ...
CMatrix aligned_basis(const CMatrix& q, double tol = kDefaultTol);

double max_abs(const CMatrix& m);

/// Kronecker product; kron(a, b) vec(y) = vec(a y b^T) for row-major vec.
CMatrix kron(const CMatrix& a, const CMatrix& b);

}  // namespace mpsx

#endif
