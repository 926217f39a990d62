#include "mpsx/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace mpsx {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::StructureUncertain: return "StructureUncertain";
    case ErrorKind::InvalidMode: return "InvalidMode";
    case ErrorKind::InconsistentBasis: return "InconsistentBasis";
    case ErrorKind::InvalidALow: return "InvalidALow";
    case ErrorKind::NotStable: return "NotStable";
    case ErrorKind::NotTI: return "NotTI";
    case ErrorKind::NotEquivalent: return "NotEquivalent";
    case ErrorKind::RelationNotFound: return "RelationNotFound";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::SectorConflict: return "SectorConflict";
  }
  return "Error";
}

CVector vec(const CMatrix& m) {
  CVector v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

CMatrix unvec(const CVector& v, int rows, int cols) {
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = v(i * cols + j);
  return m;
}

bool all_finite(const CMatrix& m) {
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    const cplx z = m.data()[k];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

double max_abs(const CMatrix& m) {
  double r = 0;
  for (Eigen::Index k = 0; k < m.size(); ++k) r = std::max(r, std::abs(m.data()[k]));
  return r;
}

int rank(const CMatrix& m, double tol) {
  if (tol <= 0) throw Error(ErrorKind::InvalidInput, "rank: tol must be positive");
  if (!all_finite(m)) throw Error(ErrorKind::InvalidInput, "rank: non-finite entries");
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0;
  const double ref = s(0) > 0 ? s(0) : 1.0;
  int r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > tol * ref) ++r;
  return r;
}

namespace {

// One pass of modified Gram-Schmidt with re-orthogonalization.
bool gs_add(CMatrix& q, int& count, CVector v, double thresh) {
  for (int pass = 0; pass < 2; ++pass)
    for (int k = 0; k < count; ++k) v -= q.col(k) * q.col(k).dot(v);
  const double n = v.norm();
  if (n <= thresh) return false;
  if (count >= q.cols()) q.conservativeResize(Eigen::NoChange, std::max<Eigen::Index>(1, 2 * q.cols()));
  q.col(count++) = v / n;
  return true;
}

}  // namespace

VectorSpace orthonormalize_columns(const CMatrix& cols, int ambient_dim, double tol) {
  if (ambient_dim <= 0) throw Error(ErrorKind::InvalidInput, "orthonormalize: empty ambient dimension");
  if (cols.cols() > 0 && cols.rows() != ambient_dim)
    throw Error(ErrorKind::InvalidInput, "orthonormalize: vector length mismatch");
  double scale = 0;
  for (Eigen::Index k = 0; k < cols.cols(); ++k) scale = std::max(scale, cols.col(k).norm());
  VectorSpace out;
  out.ambient_dim = ambient_dim;
  out.tol = tol;
  if (scale == 0 || cols.cols() == 0) {
    out.basis = CMatrix(ambient_dim, 0);
    return out;
  }
  // SVD gives the numerically robust rank; the basis is taken from the left singular vectors.
  // JacobiSVD: BDCSVD returns non-finite U on clustered singular values.
  Eigen::JacobiSVD<CMatrix> svd(cols, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > tol * scale) ++r;
  out.basis = svd.matrixU().leftCols(r);
  return out;
}

VectorSpace orthonormalize(const std::vector<CVector>& vectors, double tol) {
  if (vectors.empty()) throw Error(ErrorKind::InvalidInput, "orthonormalize: no vectors");
  const int n = static_cast<int>(vectors[0].size());
  CMatrix cols(n, vectors.size());
  for (size_t k = 0; k < vectors.size(); ++k) {
    if (vectors[k].size() != n) throw Error(ErrorKind::InvalidInput, "orthonormalize: vector length mismatch");
    cols.col(k) = vectors[k];
  }
  return orthonormalize_columns(cols, n, tol);
}

VectorSpace space_from_orthonormal(const CMatrix& q, double tol) {
  VectorSpace s;
  s.ambient_dim = static_cast<int>(q.rows());
  s.basis = q;
  s.tol = tol;
  return s;
}

double residual(const VectorSpace& space, const CVector& v) {
  if (v.size() != space.ambient_dim) throw Error(ErrorKind::InvalidInput, "contains: dimension mismatch");
  if (space.dim() == 0) return v.norm();
  CVector r = v - space.basis * (space.basis.adjoint() * v);
  r -= space.basis * (space.basis.adjoint() * r);
  return r.norm();
}

bool contains(const VectorSpace& space, const CVector& v) {
  const double n = v.norm();
  if (v.size() != space.ambient_dim) throw Error(ErrorKind::InvalidInput, "contains: dimension mismatch");
  if (n == 0) return true;
  return residual(space, v) <= space.tol * n;
}

VectorSpace orthogonal_complement(const VectorSpace& a) {
  const int n = a.ambient_dim;
  CMatrix q(n, n);
  int count = 0;
  for (int k = 0; k < a.dim(); ++k) q.col(count++) = a.basis.col(k);
  CMatrix out(n, n - a.dim());
  int added = 0;
  for (int i = 0; i < n && added < n - a.dim(); ++i) {
    CVector e = CVector::Zero(n);
    e(i) = 1;
    int before = count;
    if (gs_add(q, count, e, 1e-8)) {
      out.col(added++) = q.col(before);
    }
  }
  VectorSpace c;
  c.ambient_dim = n;
  c.basis = out.leftCols(added);
  c.tol = a.tol;
  return c;
}

VectorSpace intersect(const VectorSpace& a, const VectorSpace& b) {
  if (a.ambient_dim != b.ambient_dim) throw Error(ErrorKind::InvalidInput, "intersect: dimension mismatch");
  const double tol = std::max(a.tol, b.tol);
  VectorSpace out;
  out.ambient_dim = a.ambient_dim;
  out.tol = tol;
  if (a.dim() == 0 || b.dim() == 0) {
    out.basis = CMatrix(a.ambient_dim, 0);
    return out;
  }
  // x = A y lies in b iff (I - B B^*) A y = 0
  VectorSpace bc = orthogonal_complement(b);
  CMatrix m = bc.basis.adjoint() * a.basis;
  CMatrix y = m.rows() == 0 ? CMatrix(CMatrix::Identity(a.dim(), a.dim())) : nullspace(m, tol);
  CMatrix x = a.basis * y;
  out = orthonormalize_columns(x, a.ambient_dim, tol);
  out.tol = tol;
  return out;
}

int extend(VectorSpace& space, const std::vector<CVector>& vectors, double scale) {
  CMatrix q = space.basis;
  int count = space.dim();
  q.conservativeResize(space.ambient_dim, std::max<Eigen::Index>(1, count + static_cast<Eigen::Index>(vectors.size())));
  int added = 0;
  for (const auto& v : vectors)
    if (gs_add(q, count, v, space.tol * scale)) ++added;
  space.basis = q.leftCols(count);
  return added;
}

CMatrix nullspace(const CMatrix& m, double tol) {
  const Eigen::Index n = m.cols();
  if (m.rows() == 0) return CMatrix::Identity(n, n);
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double ref = s.size() > 0 && s(0) > 0 ? s(0) : 1.0;
  Eigen::Index r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > tol * ref) ++r;
  return svd.matrixV().rightCols(n - r);
}

CMatrix lstsq(const CMatrix& a, const CMatrix& b, double tol) {
  if (a.cols() == 0) return CMatrix::Zero(0, b.cols());
  Eigen::CompleteOrthogonalDecomposition<CMatrix> cod;
  cod.setThreshold(tol);
  cod.compute(a);
  return cod.solve(b);
}

void fix_phase(Eigen::Ref<CVector> v) {
  Eigen::Index best = 0;
  double bm = -1;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > bm + 1e-12) {
      bm = a;
      best = i;
    }
  }
  if (bm <= 0) return;
  const cplx ph = std::conj(v(best)) / bm;
  v *= ph;
}

CMatrix aligned_basis(const CMatrix& q, double tol) {
  const Eigen::Index n = q.rows();
  const Eigen::Index k = q.cols();
  CMatrix proj = q * q.adjoint();
  CMatrix out(n, k);
  int count = 0;
  // pick projected unit vectors greedily, largest residual first among the earliest indices
  for (Eigen::Index i = 0; i < n && count < k; ++i) {
    CVector v = proj.col(i);
    for (int pass = 0; pass < 2; ++pass)
      for (int c = 0; c < count; ++c) v -= out.col(c) * out.col(c).dot(v);
    const double nv = v.norm();
    if (nv > 0.5 / std::sqrt(static_cast<double>(n)) && nv > tol) {
      out.col(count++) = v / nv;
    }
  }
  // fallback for spaces poorly aligned with the unit vectors
  for (Eigen::Index i = 0; i < k && count < k; ++i) {
    CVector v = q.col(i);
    for (int pass = 0; pass < 2; ++pass)
      for (int c = 0; c < count; ++c) v -= out.col(c) * out.col(c).dot(v);
    const double nv = v.norm();
    if (nv > 1e-6) out.col(count++) = v / nv;
  }
  for (int c = 0; c < count; ++c) fix_phase(out.col(c));
  return out.leftCols(count);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

}  // namespace mpsx
