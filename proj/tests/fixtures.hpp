/** @file fixtures.hpp
 * Named tensors used across the test suites, random generators, and
 * conversion into the oracle representation.
 */
#ifndef MPSX_TESTS_FIXTURES_HPP
#define MPSX_TESTS_FIXTURES_HPP

#include <cmath>
#include <random>
#include <vector>

#include "mpsx/matrix_sets.hpp"
#include "oracles.hpp"

namespace fx {

using mpsx::CMatrix;
using mpsx::cplx;
using mpsx::MatrixSet;

inline CMatrix unit(int D, int i, int j) {
  CMatrix m = CMatrix::Zero(D, D);
  m(i, j) = 1;
  return m;
}

inline CMatrix diag(std::vector<cplx> v) {
  CMatrix m = CMatrix::Zero(v.size(), v.size());
  for (size_t k = 0; k < v.size(); ++k) m(k, k) = v[k];
  return m;
}

/// W tensor: A0 = I, A1 = E12 (1-based), boundary E21.
inline MatrixSet w_tensor() { return MatrixSet({CMatrix::Identity(2, 2), unit(2, 0, 1)}); }
inline CMatrix w_boundary() { return unit(2, 1, 0); }

inline MatrixSet ghz_tensor() { return MatrixSet({diag({1, 0}), diag({0, 1})}); }

inline MatrixSet jordan_tensor() {
  CMatrix j(2, 2);
  j << 1, 1, 0, 1;
  return MatrixSet({j});
}

inline MatrixSet irrational_phase_tensor() {
  return MatrixSet({diag({1, std::exp(cplx(0, std::sqrt(2.0) * M_PI))})});
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(12345);
  return g;
}

inline CMatrix random_matrix(int r, int c, std::mt19937_64& g = rng()) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = cplx(n(g), n(g));
  return m;
}

/// Random matrix with condition number kept moderate (identity plus small noise scaled).
inline CMatrix random_invertible(int D, std::mt19937_64& g = rng()) {
  CMatrix m = random_matrix(D, D, g) * 0.4 + CMatrix::Identity(D, D);
  return m;
}

inline CMatrix random_unitary(int D, std::mt19937_64& g = rng()) {
  Eigen::HouseholderQR<CMatrix> qr(random_matrix(D, D, g));
  return qr.householderQ();
}

inline MatrixSet random_set(int d, int D, std::mt19937_64& g = rng()) {
  std::vector<CMatrix> m;
  for (int i = 0; i < d; ++i) m.push_back(random_matrix(D, D, g));
  return MatrixSet(m);
}

/// Letters [[A,C,D,E],[0,B,0,0],[0,0,A,D],[0,0,0,A]] with random n x n entries.
inline MatrixSet nonsemisimple_tensor(int d, int n, std::mt19937_64& g) {
  std::vector<CMatrix> out;
  for (int x = 0; x < d; ++x) {
    CMatrix a = random_matrix(n, n, g), b = random_matrix(n, n, g), c = random_matrix(n, n, g),
            dd = random_matrix(n, n, g), e = random_matrix(n, n, g);
    CMatrix m = CMatrix::Zero(4 * n, 4 * n);
    m.block(0, 0, n, n) = a;
    m.block(0, n, n, n) = c;
    m.block(0, 2 * n, n, n) = dd;
    m.block(0, 3 * n, n, n) = e;
    m.block(n, n, n, n) = b;
    m.block(2 * n, 2 * n, n, n) = a;
    m.block(2 * n, 3 * n, n, n) = dd;
    m.block(3 * n, 3 * n, n, n) = a;
    out.push_back(m);
  }
  return MatrixSet(out);
}

/// Letters [[B,C],[0,B]] with random n x n entries.
inline MatrixSet wlike_tensor(int d, int n, std::mt19937_64& g) {
  std::vector<CMatrix> out;
  for (int x = 0; x < d; ++x) {
    CMatrix b = random_matrix(n, n, g), c = random_matrix(n, n, g);
    CMatrix m = CMatrix::Zero(2 * n, 2 * n);
    m.block(0, 0, n, n) = b;
    m.block(0, n, n, n) = c;
    m.block(n, n, n, n) = b;
    out.push_back(m);
  }
  return MatrixSet(out);
}

inline MatrixSet conjugate(const MatrixSet& s, const CMatrix& p) { return s.conjugated(p, p.inverse()); }

inline oracle::Mat to_oracle(const CMatrix& m) {
  oracle::Mat o(static_cast<int>(m.rows()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) o(i, j) = m(i, j);
  return o;
}

inline std::vector<oracle::Mat> to_oracle(const MatrixSet& s) {
  std::vector<oracle::Mat> out;
  for (const auto& a : s.mats) out.push_back(to_oracle(a));
  return out;
}

inline std::vector<cplx> to_std(const mpsx::CVector& v) { return std::vector<cplx>(v.data(), v.data() + v.size()); }

}  // namespace fx

#endif
