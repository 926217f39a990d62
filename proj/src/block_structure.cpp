#include "mpsx/block_structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace mpsx {

int BlockPartition::block_of(int index) const {
  for (int k = 0; k < b(); ++k)
    if (index < offsets[k] + sizes[k]) return k;
  return b() - 1;
}

namespace {

CMatrix stack_rows(const std::vector<CMatrix>& ms, int n) {
  CMatrix s(n * static_cast<int>(ms.size()), n);
  for (size_t k = 0; k < ms.size(); ++k) s.middleRows(k * n, n) = ms[k];
  return s;
}

double scale_of(const std::vector<CMatrix>& ms) {
  double s = 0;
  for (const auto& m : ms) s = std::max(s, m.norm());
  return s;
}

std::vector<CMatrix> restrict_to(const std::vector<CMatrix>& gens, const CMatrix& w) {
  std::vector<CMatrix> out;
  for (const auto& g : gens) out.push_back(w.adjoint() * g * w);
  return out;
}

CMatrix unit_col(int n, int i) {
  CMatrix e = CMatrix::Zero(n, 1);
  e(i, 0) = 1;
  return e;
}

// Candidates aligned with the earliest unit vectors win; ties go to the larger overlap.
bool better_candidate(const CMatrix& a, const CMatrix& b) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ra = a.row(i).norm(), rb = b.row(i).norm();
    const bool sa = ra > 1e-6, sb = rb > 1e-6;
    if (sa != sb) return sa;
    if (sa && sb) {
      if (std::abs(ra - rb) > 1e-9) return ra > rb;
      return a.cols() < b.cols();
    }
  }
  return false;
}

bool burnside_irreducible(const std::vector<CMatrix>& alg, const CMatrix& u, double tol) {
  const int k = static_cast<int>(u.cols());
  std::vector<CMatrix> r = restrict_to(alg, u);
  return matrix_span(r, k, tol).dim() == k * k;
}

// Newton steps on u + uc X: solve a22 X - X a11 = -a21 for every generator in least squares.
// A step is kept only when it lowers the invariance residual.
double invariance_residual(const std::vector<CMatrix>& gens, const CMatrix& u, const CMatrix& uc) {
  double res = 0;
  for (const auto& g : gens) res = std::max(res, (uc.adjoint() * g * u).norm());
  return res;
}

void refine_invariant(const std::vector<CMatrix>& gens, CMatrix& u, CMatrix& uc) {
  const Eigen::Index k = u.cols(), r = uc.cols();
  const double sc = std::max(scale_of(gens), 1e-300);
  double res = invariance_residual(gens, u, uc);
  for (int it = 0; it < 4 && res > 1e-15 * sc; ++it) {
    CMatrix a(r * k * static_cast<Eigen::Index>(gens.size()), r * k);
    CVector rhs(a.rows());
    for (size_t g = 0; g < gens.size(); ++g) {
      CMatrix a11 = u.adjoint() * gens[g] * u, a21 = uc.adjoint() * gens[g] * u, a22 = uc.adjoint() * gens[g] * uc;
      a.middleRows(g * r * k, r * k) =
          kron(a22, CMatrix::Identity(k, k)) - kron(CMatrix::Identity(r, r), a11.transpose());
      rhs.segment(g * r * k, r * k) = -vec(a21);
    }
    CMatrix x = unvec(lstsq(a, rhs, 1e-8), static_cast<int>(r), static_cast<int>(k));
    Eigen::HouseholderQR<CMatrix> qr(u + uc * x);
    CMatrix nu = qr.householderQ() * CMatrix::Identity(u.rows(), k);
    CMatrix nuc = orthogonal_complement(space_from_orthonormal(nu, 1e-9)).basis;
    const double nres = invariance_residual(gens, nu, nuc);
    if (nres >= res) return;
    u = nu;
    uc = nuc;
    res = nres;
  }
}

}  // namespace

CMatrix minimal_invariant_subspace(const std::vector<CMatrix>& gens, int n, std::mt19937_64& rng, double tol) {
  AlgebraRep alg = generate_algebra(gens, n, tol);
  if (alg.dim() == 0) return unit_col(n, 0);
  std::vector<CMatrix> el = alg.elements();
  const int m = alg.dim();

  // Radical of the algebra from the trace form.
  CMatrix g(m, m);
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l) g(k, l) = (el[k] * el[l]).trace();
  CMatrix rc = nullspace(g, 1e-8);
  if (rc.cols() > 0) {
    std::vector<CMatrix> rad;
    for (Eigen::Index c = 0; c < rc.cols(); ++c) {
      CMatrix r = CMatrix::Zero(n, n);
      for (int k = 0; k < m; ++k) r += rc(k, c) * el[k];
      rad.push_back(r);
    }
    CMatrix w = nullspace(stack_rows(rad, n), 1e-8);
    if (w.cols() > 0 && w.cols() < n) {
      w = aligned_basis(w, tol);
      CMatrix wc = orthogonal_complement(space_from_orthonormal(w, tol)).basis;
      refine_invariant(gens, w, wc);
      for (const auto& a : gens)
        if ((a * w - w * (w.adjoint() * a * w)).norm() > 1e-7 * std::max(1.0, a.norm()))
          throw Error(ErrorKind::StructureUncertain, "kernel of the radical is not invariant");
      CMatrix inner = minimal_invariant_subspace(restrict_to(gens, w), static_cast<int>(w.cols()), rng, tol);
      return aligned_basis(w * inner, tol);
    }
  }

  // Semisimple action: eigenvectors of a random element generate the irreducible pieces.
  std::vector<CMatrix> candidates;
  CMatrix k0 = nullspace(stack_rows(el, n), 1e-8);
  if (k0.cols() > 0) candidates.push_back(aligned_basis(k0, tol).col(0));

  std::normal_distribution<double> nd(0.0, 1.0);
  const double sc = scale_of(el);
  bool ok = false;
  for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
    CMatrix x = CMatrix::Zero(n, n);
    for (int k = 0; k < m; ++k) x += cplx(nd(rng), nd(rng)) * el[k];
    Eigen::ComplexEigenSolver<CMatrix> es(x);
    const auto& lam = es.eigenvalues();
    const double lscale = std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
    std::vector<bool> used(n, false);
    std::vector<CMatrix> found;
    ok = true;
    for (int a = 0; a < n && ok; ++a) {
      if (used[a]) continue;
      used[a] = true;
      for (int c = a + 1; c < n; ++c)
        if (std::abs(lam(c) - lam(a)) <= 1e-6 * lscale) used[c] = true;
      if (std::abs(lam(a)) <= 1e-8 * lscale) continue;
      CVector u = es.eigenvectors().col(a);
      CMatrix orbit(n, m);
      for (int k = 0; k < m; ++k) orbit.col(k) = el[k] * u;
      VectorSpace us = orthonormalize_columns(orbit, n, 1e-8);
      if (us.dim() == 0 || !burnside_irreducible(el, us.basis, tol)) {
        ok = false;
        break;
      }
      found.push_back(aligned_basis(us.basis, tol));
    }
    if (ok) candidates.insert(candidates.end(), found.begin(), found.end());
  }
  if (!ok || candidates.empty() || sc == 0)
    throw Error(ErrorKind::StructureUncertain, "no certified irreducible invariant subspace found");
  size_t best = 0;
  for (size_t c = 1; c < candidates.size(); ++c)
    if (better_candidate(candidates[c], candidates[best])) best = c;
  return candidates[best];
}

namespace {

void triangularize_rec(const std::vector<CMatrix>& gens, int n, std::mt19937_64& rng, double tol, CMatrix& q,
                       std::vector<int>& sizes) {
  CMatrix u = minimal_invariant_subspace(gens, n, rng, tol);
  const int k = static_cast<int>(u.cols());
  sizes.push_back(k);
  if (k == n) {
    q = CMatrix::Identity(n, n);
    return;
  }
  VectorSpace us = space_from_orthonormal(u, tol);
  CMatrix uc = orthogonal_complement(us).basis;
  refine_invariant(gens, u, uc);
  CMatrix q2;
  triangularize_rec(restrict_to(gens, uc), n - k, rng, tol, q2, sizes);
  q.resize(n, n);
  q.leftCols(k) = u;
  q.rightCols(n - k) = uc * q2;
}

void fill_offsets(BlockPartition& p) {
  p.offsets.assign(p.sizes.size(), 0);
  for (size_t k = 1; k < p.sizes.size(); ++k) p.offsets[k] = p.offsets[k - 1] + p.sizes[k - 1];
}

long lcm_long(long a, long b) { return a / std::gcd(a, b) * b; }

// smallest length at which the span of the block letters satisfies `pred`
template <typename Pred>
long first_length(const std::vector<CMatrix>& letters, int n, int cap, double tol, Pred pred) {
  VectorSpace first = matrix_span(letters, n, tol);
  VectorSpace cur = first;
  for (int l = 1; l <= cap; ++l) {
    if (pred(cur)) return l;
    cur = product_span(cur, first, n, tol);
  }
  return kInfinite;
}

}  // namespace

Triangularized triangularize(const MatrixSet& s, const Options& opt) {
  std::mt19937_64 rng(opt.seed);
  const int n = s.D;
  CMatrix q;
  std::vector<int> sizes;
  triangularize_rec(s.mats, n, rng, opt.tol, q, sizes);

  Triangularized t;
  t.part.D = n;
  t.part.sizes = sizes;
  fill_offsets(t.part);
  t.part.P = q.adjoint();
  t.part.Pinv = q;
  std::vector<CMatrix> g;
  const double sc = std::max(scale_of(s.mats), 1e-300);
  for (const auto& a : s.mats) {
    CMatrix ga = q.adjoint() * a * q;
    for (int i = 0; i < t.part.b(); ++i)
      for (int j = 0; j < i; ++j) {
        auto blk = ga.block(t.part.offsets[i], t.part.offsets[j], sizes[i], sizes[j]);
        if (blk.norm() > 1e-7 * sc) throw Error(ErrorKind::StructureUncertain, "triangularization residual too large");
        blk.setZero();
      }
    g.push_back(ga);
  }
  t.gauged = MatrixSet(g);
  const int b = t.part.b();
  t.part.cls.assign(b, 0);
  t.part.rep.assign(b, 0);
  t.part.mu.assign(b, cplx(1));
  t.part.Z.assign(b, CMatrix());
  return t;
}

int detect_period(const Triangularized& t, double tol) {
  (void)tol;
  long p = 1;
  const auto& part = t.part;
  for (int j = 0; j < part.b(); ++j) {
    const int dj = part.sizes[j];
    CMatrix e = CMatrix::Zero(dj * dj, dj * dj);
    for (const auto& a : t.gauged.mats) {
      CMatrix bj = part.block(a, j, j);
      e += kron(bj, bj.conjugate());
    }
    Eigen::ComplexEigenSolver<CMatrix> es(e, false);
    const auto lam = es.eigenvalues().cwiseAbs();
    const double r = lam.maxCoeff();
    int count = 1;
    if (r > 1e-12) {
      count = 0;
      for (Eigen::Index k = 0; k < lam.size(); ++k)
        if (lam(k) >= r * (1 - 1e-7)) ++count;
    }
    p = lcm_long(p, count);
  }
  return static_cast<int>(p);
}

bool relate_blocks(const std::vector<CMatrix>& b, const std::vector<CMatrix>& c, cplx& mu, CMatrix& z, double tol) {
  const int n = static_cast<int>(b[0].rows());
  if (c[0].rows() != n) return false;
  CMatrix eb = CMatrix::Zero(n * n, n * n), mix = CMatrix::Zero(n * n, n * n);
  for (size_t x = 0; x < b.size(); ++x) {
    eb += kron(b[x], b[x].conjugate());
    mix += kron(c[x], b[x].conjugate());
  }
  Eigen::ComplexEigenSolver<CMatrix> se(eb), sm(mix);
  Eigen::Index ib = 0, im = 0;
  se.eigenvalues().cwiseAbs().maxCoeff(&ib);
  sm.eigenvalues().cwiseAbs().maxCoeff(&im);
  const cplx rb = se.eigenvalues()(ib);
  if (std::abs(rb) < 1e-12) return false;
  CMatrix rho = unvec(se.eigenvectors().col(ib), n, n);
  const cplx tr = rho.trace();
  if (std::abs(tr) < 1e-12) return false;
  rho /= tr;
  rho = (rho + rho.adjoint()) / 2.0;
  mu = sm.eigenvalues()(im) / rb;
  CMatrix y = unvec(sm.eigenvectors().col(im), n, n);
  z = y * rho.inverse();
  Eigen::FullPivLU<CMatrix> lu(z);
  if (!lu.isInvertible()) return false;
  Eigen::JacobiSVD<CMatrix> svd(z);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) < 1e-8 * sv(0)) return false;
  // canonical scale: unit-modulus trace phase (or largest entry), Frobenius norm sqrt(n)
  cplx ph = z.trace();
  if (std::abs(ph) < 1e-9 * z.norm()) {
    Eigen::Index r, cidx;
    z.cwiseAbs().maxCoeff(&r, &cidx);
    ph = z(r, cidx);
  }
  z *= std::conj(ph) / std::abs(ph);
  z *= std::sqrt(static_cast<double>(n)) / z.norm();
  CMatrix zi = z.inverse();
  double res = 0, sc = 0;
  for (size_t x = 0; x < b.size(); ++x) {
    res = std::max(res, (c[x] - mu * z * b[x] * zi).norm());
    sc = std::max(sc, c[x].norm());
  }
  return res <= std::max(tol, 1e-8) * std::max(sc, 1e-300) * 10;
}

void classify_diagonal(Triangularized& t, const Options& opt) {
  auto& part = t.part;
  const int b = part.b();
  part.cls.assign(b, -1);
  part.rep.assign(b, -1);
  part.mu.assign(b, cplx(0));
  part.Z.assign(b, CMatrix());
  part.n_classes = 0;
  const double sc = std::max(scale_of(t.gauged.mats), 1e-300);
  std::vector<int> reps;
  for (int j = 0; j < b; ++j) {
    std::vector<CMatrix> bj;
    double nrm = 0;
    for (const auto& a : t.gauged.mats) {
      bj.push_back(part.block(a, j, j));
      nrm = std::max(nrm, bj.back().norm());
    }
    if (nrm <= 1e-9 * sc) continue;
    bool found = false;
    for (int r : reps) {
      if (part.sizes[r] != part.sizes[j]) continue;
      std::vector<CMatrix> br;
      for (const auto& a : t.gauged.mats) br.push_back(part.block(a, r, r));
      cplx mu;
      CMatrix z;
      if (relate_blocks(br, bj, mu, z, opt.tol)) {
        part.cls[j] = part.cls[r];
        part.rep[j] = r;
        part.mu[j] = mu;
        part.Z[j] = z;
        found = true;
        break;
      }
    }
    if (!found) {
      part.cls[j] = part.n_classes++;
      part.rep[j] = j;
      part.mu[j] = 1;
      part.Z[j] = CMatrix::Identity(part.sizes[j], part.sizes[j]);
      reps.push_back(j);
    }
  }

  // order of the root of unity relating equivalent blocks
  part.q = 1;
  bool unit = true;
  for (int j = 0; j < b; ++j)
    if (part.cls[j] >= 0 && std::abs(std::abs(part.mu[j]) - 1) > 1e-8) unit = false;
  if (!unit) {
    part.q = kInfinite;
  } else {
    part.q = kInfinite;
    for (int n = 1; n <= opt.q_max; ++n) {
      bool all = true;
      for (int j = 0; j < b && all; ++j)
        if (part.cls[j] >= 0 && std::abs(std::pow(part.mu[j], n) - cplx(1)) > 1e-8) all = false;
      if (all) {
        part.q = n;
        break;
      }
    }
  }

  // diagonal Wielandt-type lengths
  long l0 = 1, lbi = 1;
  for (int j = 0; j < b; ++j) {
    if (part.cls[j] < 0) continue;
    const int dj = part.sizes[j];
    std::vector<CMatrix> bj;
    for (const auto& a : t.gauged.mats) bj.push_back(part.block(a, j, j));
    CVector id = vec(CMatrix::Identity(dj, dj));
    long a = first_length(bj, dj, opt.cap_len, opt.tol, [&](const VectorSpace& s) { return contains(s, id); });
    long c = first_length(bj, dj, opt.cap_len, opt.tol, [&](const VectorSpace& s) { return s.dim() == dj * dj; });
    l0 = (a == kInfinite || l0 == kInfinite) ? kInfinite : std::max(l0, a);
    lbi = (c == kInfinite || lbi == kInfinite) ? kInfinite : std::max(lbi, c);
  }
  part.L0_diag = l0;
  part.LBI_diag = lbi;
}

StructureAnalysis analyze_structure(const MatrixSet& s, const Options& opt) {
  StructureAnalysis out;
  Triangularized t = triangularize(s, opt);
  out.p = detect_period(t, opt.tol);
  if (out.p == 1) {
    out.effective = s;
  } else {
    out.effective = MatrixSet(span_fixed_length(s, out.p, opt.tol).elements());
    t = triangularize(out.effective, opt);
  }
  classify_diagonal(t, opt);
  t.part.p = out.p;
  out.tri = t;
  return out;
}

}  // namespace mpsx
