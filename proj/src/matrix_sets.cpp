#include "mpsx/matrix_sets.hpp"

#include <cmath>
#include <string>

namespace mpsx {

MatrixSet::MatrixSet(std::vector<CMatrix> m) : mats(std::move(m)) {
  if (mats.empty()) throw Error(ErrorKind::InvalidInput, "matrix set needs d >= 1");
  d = static_cast<int>(mats.size());
  D = static_cast<int>(mats[0].rows());
  if (D < 1) throw Error(ErrorKind::InvalidInput, "matrix set needs D >= 1");
  for (const auto& a : mats) {
    if (a.rows() != D || a.cols() != D) throw Error(ErrorKind::InvalidInput, "matrices must all be D x D");
    if (!all_finite(a)) throw Error(ErrorKind::InvalidInput, "non-finite matrix entry");
  }
}

MatrixSet MatrixSet::conjugated(const CMatrix& p, const CMatrix& pinv) const {
  std::vector<CMatrix> out;
  out.reserve(mats.size());
  for (const auto& a : mats) out.push_back(p * a * pinv);
  return MatrixSet(std::move(out));
}

std::vector<CMatrix> MatSpan::elements() const {
  std::vector<CMatrix> out;
  for (int k = 0; k < dim(); ++k) out.push_back(element(k));
  return out;
}

std::vector<CMatrix> AlgebraRep::elements() const {
  std::vector<CMatrix> out;
  for (int k = 0; k < dim(); ++k) out.push_back(element(k));
  return out;
}

VectorSpace matrix_span(const std::vector<CMatrix>& mats, int D, double tol) {
  CMatrix cols(D * D, mats.size());
  for (size_t k = 0; k < mats.size(); ++k) cols.col(k) = vec(mats[k]);
  return orthonormalize_columns(cols, D * D, tol);
}

VectorSpace product_span(const VectorSpace& x, const VectorSpace& y, int D, double tol) {
  std::vector<CMatrix> xs, ys;
  for (int k = 0; k < x.dim(); ++k) xs.push_back(unvec(x.vec(k), D, D));
  for (int k = 0; k < y.dim(); ++k) ys.push_back(unvec(y.vec(k), D, D));
  CMatrix cols(D * D, xs.size() * ys.size());
  Eigen::Index c = 0;
  for (const auto& a : xs)
    for (const auto& b : ys) cols.col(c++) = vec(a * b);
  if (c == 0) {
    VectorSpace z;
    z.ambient_dim = D * D;
    z.basis = CMatrix(D * D, 0);
    z.tol = tol;
    return z;
  }
  return orthonormalize_columns(cols, D * D, tol);
}

MatSpan span_fixed_length(const MatrixSet& s, int ell, double tol) {
  if (ell < 1) throw Error(ErrorKind::InvalidInput, "span length must be >= 1");
  const int D = s.D;
  VectorSpace base = matrix_span(s.mats, D, tol);
  // binary doubling: result accumulates powers of two of the base span
  VectorSpace result;
  bool have = false;
  VectorSpace power = base;
  int e = ell;
  while (e > 0) {
    if (e & 1) {
      result = have ? product_span(result, power, D, tol) : power;
      have = true;
    }
    e >>= 1;
    if (e > 0) power = product_span(power, power, D, tol);
  }
  MatSpan out;
  out.D = D;
  out.length = ell;
  out.space = result;
  return out;
}

AlgebraRep generate_algebra(const std::vector<CMatrix>& gens, int D, double tol) {
  VectorSpace first = matrix_span(gens, D, tol);
  VectorSpace acc = first;
  VectorSpace cur = first;
  int n = 1;
  const int limit = D * D + 1;
  while (true) {
    VectorSpace next = product_span(cur, first, D, tol);
    std::vector<CVector> vs;
    for (int k = 0; k < next.dim(); ++k) vs.push_back(next.vec(k));
    const int added = extend(acc, vs, 1.0);
    if (added == 0 || n >= limit) break;
    cur = next;
    ++n;
  }
  AlgebraRep out;
  out.D = D;
  out.space = acc;
  out.r_alg = n;
  return out;
}

AlgebraRep generate_algebra(const MatrixSet& s, double tol) { return generate_algebra(s.mats, s.D, tol); }

bool contains_identity0(const MatrixSet& s, int ell, const CMatrix& id0, double tol) {
  MatSpan sp = span_fixed_length(s, ell, tol);
  sp.space.tol = std::max(tol, 1e-9);
  return contains(sp.space, vec(id0));
}

CMatrix word_product(const MatrixSet& s, const std::vector<int>& word) {
  CMatrix m = CMatrix::Identity(s.D, s.D);
  for (int x : word) m = m * s.mats[x];
  return m;
}

MatrixSet block_physical(const MatrixSet& s, int ell, long cap) {
  if (ell < 1) throw Error(ErrorKind::InvalidInput, "blocking length must be >= 1");
  double count = std::pow(static_cast<double>(s.d), ell);
  if (count > static_cast<double>(cap))
    throw Error(ErrorKind::CapExceeded, "d^l = " + std::to_string(s.d) + "^" + std::to_string(ell) +
                                            " exceeds the physical blocking cap " + std::to_string(cap));
  std::vector<CMatrix> cur = s.mats;
  for (int k = 1; k < ell; ++k) {
    std::vector<CMatrix> next;
    next.reserve(cur.size() * s.d);
    for (const auto& a : cur)
      for (const auto& b : s.mats) next.push_back(a * b);
    cur.swap(next);
  }
  return MatrixSet(std::move(cur));
}

}  // namespace mpsx
