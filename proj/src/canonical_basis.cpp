#include "mpsx/canonical_basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mpsx {

std::vector<CMatrix> StructuredBasis::decompose(const CMatrix& a) const {
  std::vector<CMatrix> out;
  out.reserve(labels.size());
  for (size_t e = 0; e < labels.size(); ++e) {
    const Label& l = labels[e];
    out.push_back(block(a, l.i0, l.j0) / k[l.i0][l.j0][e]);
  }
  return out;
}

CMatrix StructuredBasis::reconstruct(const std::vector<CMatrix>& contents) const {
  CMatrix a = CMatrix::Zero(D, D);
  for (int i = 0; i < b(); ++i)
    for (int j = i; j < b(); ++j)
      for (size_t e = 0; e < labels.size(); ++e) {
        const cplx c = k[i][j][e];
        if (c == cplx(0)) continue;
        a.block(offsets[i], offsets[j], sizes[i], sizes[j]) += c * contents[e];
      }
  return a;
}

CMatrix StructuredBasis::a_low(int e) const {
  CMatrix m = CMatrix::Zero(b(), b());
  for (int i = 0; i < b(); ++i)
    for (int j = 0; j < b(); ++j) m(i, j) = k[i][j][e];
  return m;
}

int StructuredBasis::n_coords() const {
  int n = 0;
  for (const auto& l : labels) n += l.rows * l.cols;
  return n;
}

namespace {

struct Work {
  int b = 0;
  std::vector<int> sizes, offsets;
  std::vector<CMatrix> el;
  CMatrix P, Pinv;
  double scale = 0;

  CMatrix blk(const CMatrix& a, int i, int j) const { return a.block(offsets[i], offsets[j], sizes[i], sizes[j]); }

  /// Columns are vec of block (i,j) of each element.
  CMatrix block_cols(int i, int j) const {
    CMatrix y(sizes[i] * sizes[j], el.size());
    for (size_t c = 0; c < el.size(); ++c) y.col(c) = vec(blk(el[c], i, j));
    return y;
  }

  void gauge(const CMatrix& t, const CMatrix& ti) {
    for (auto& e : el) e = t * e * ti;
    P = t * P;
    Pinv = Pinv * ti;
  }
};

double zero_tol(const Options& opt) { return std::max(opt.tol, 1e-12) * 10; }

// F(M) = mu Z M Z^-1 on n x n matrices; F acts on row-major vec.
bool extract_automorphism(const CMatrix& f, int n, cplx& mu, CMatrix& z) {
  auto apply = [&](const CMatrix& m) { return unvec(f * vec(m), n, n); };
  mu = apply(CMatrix::Identity(n, n)).trace() / static_cast<double>(n);
  if (std::abs(mu) < 1e-12) return false;
  if (n == 1) {
    z = CMatrix::Identity(1, 1);
    return std::abs(f(0, 0) - mu) < 1e-8 * std::abs(mu);
  }
  auto unit = [&](int p, int q) {
    CMatrix e = CMatrix::Zero(n, n);
    e(p, q) = 1;
    return e;
  };
  int bq = 0, bm = 0;
  double best = -1;
  for (int q0 = 0; q0 < n; ++q0) {
    CMatrix g = apply(unit(0, q0)) / mu;
    for (int m = 0; m < n; ++m)
      if (g.col(m).norm() > best + 1e-12) {
        best = g.col(m).norm();
        bq = q0;
        bm = m;
      }
  }
  z.resize(n, n);
  for (int p = 0; p < n; ++p) z.col(p) = (apply(unit(p, bq)) / mu).col(bm);
  Eigen::JacobiSVD<CMatrix> svd(z);
  const auto& sv = svd.singularValues();
  if (sv(n - 1) < 1e-8 * sv(0)) return false;
  cplx ph = z.trace();
  if (std::abs(ph) < 1e-9 * z.norm()) {
    Eigen::Index r, c;
    z.cwiseAbs().maxCoeff(&r, &c);
    ph = z(r, c);
  }
  z *= std::conj(ph) / std::abs(ph);
  z *= std::sqrt(static_cast<double>(n)) / z.norm();
  CMatrix zi = z.inverse();
  double res = 0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) res = std::max(res, (apply(unit(p, q)) - mu * z * unit(p, q) * zi).norm());
  return res <= 1e-7 * std::max(1.0, f.norm());
}

// Coordinates of all labels as rows, one column per element.
CMatrix coordinate_matrix(const Work& w, const std::vector<Label>& labels) {
  int rows = 0;
  for (const auto& l : labels) rows += l.rows * l.cols;
  CMatrix c(rows, w.el.size());
  int off = 0;
  for (const auto& l : labels) {
    c.middleRows(off, l.rows * l.cols) = w.block_cols(l.i0, l.j0);
    off += l.rows * l.cols;
  }
  return c;
}

struct OffDiagSolution {
  bool ok = false;
  CMatrix ptilde;
  std::vector<std::pair<int, cplx>> k;  // (label, coefficient)
};

OffDiagSolution solve_offdiag(const Work& w, const std::vector<Label>& labels, const std::vector<int>& cls,
                              const std::vector<cplx>& mu, int i, int j, const CMatrix& f, bool allow_diag,
                              BasisMode mode) {
  const int di = w.sizes[i], dj = w.sizes[j];
  const int ci = cls[i], cj = cls[j];
  std::vector<int> phi;
  for (size_t e = 0; e < labels.size(); ++e) {
    const Label& l = labels[e];
    if (!l.diagonal && l.r1 == ci && l.r2 == cj && l.rows == di && l.cols == dj) phi.push_back(static_cast<int>(e));
  }
  if (allow_diag && mode == BasisMode::Span && ci == cj && ci >= 0) {
    for (size_t e = 0; e < labels.size(); ++e)
      if (labels[e].diagonal && labels[e].cls == ci) phi.push_back(static_cast<int>(e));
  }
  const int np = di * dj;
  const int nu = np + static_cast<int>(phi.size());
  const int nc = static_cast<int>(f.cols());
  CMatrix a = CMatrix::Zero(static_cast<Eigen::Index>(nc) * np, nu);
  CVector rhs(static_cast<Eigen::Index>(nc) * np);
  int c = 0;
  for (size_t e = 0; e < labels.size(); ++e) {
    const Label& l = labels[e];
    const int pos = static_cast<int>(std::find(phi.begin(), phi.end(), static_cast<int>(e)) - phi.begin());
    for (int p = 0; p < l.rows; ++p)
      for (int q = 0; q < l.cols; ++q, ++c) {
        const Eigen::Index base = static_cast<Eigen::Index>(c) * np;
        rhs.segment(base, np) = -f.col(c);
        if (l.diagonal && l.cls == cj && cj >= 0)
          for (int r = 0; r < di; ++r) a(base + r * dj + q, r * dj + p) += mu[j];
        if (l.diagonal && l.cls == ci && ci >= 0)
          for (int s = 0; s < dj; ++s) a(base + p * dj + s, q * dj + s) -= mu[i];
        if (pos < static_cast<int>(phi.size())) a(base + p * dj + q, np + pos) -= 1.0;
      }
  }
  CVector u = lstsq(a, rhs, 1e-10);
  const double res = (a * u - rhs).norm();
  OffDiagSolution out;
  out.ok = res <= 1e-8 * std::max(1.0, f.norm());
  out.ptilde = unvec(u.head(np), di, dj);
  for (size_t t = 0; t < phi.size(); ++t) out.k.push_back({phi[t], u(np + t)});
  return out;
}

// Isolatability: smallest l whose span has an element vanishing on all earlier blocks but not on (i,j).
void isolatability(StructuredBasis& sb, const std::vector<CMatrix>& letters, const Options& opt) {
  const int b = sb.b();
  std::vector<std::pair<int, int>> order;
  for (int dl = 0; dl < b; ++dl)
    for (int i = 0; i + dl < b; ++i) order.push_back({i, i + dl});
  std::vector<std::pair<int, int>> pending;
  for (int dl = 1; dl < b; ++dl)
    for (int i = 0; i + dl < b; ++i) {
      pending.push_back({i, i + dl});
      sb.m[{i, i + dl}] = kInfinite;
    }
  if (pending.empty()) return;
  VectorSpace first = matrix_span(letters, sb.D, opt.tol);
  VectorSpace cur = first;
  for (int l = 1; l <= opt.m_ell_max && !pending.empty(); ++l) {
    if (l > 1) cur = product_span(cur, first, sb.D, opt.tol);
    std::vector<CMatrix> el;
    for (int e = 0; e < cur.dim(); ++e) el.push_back(unvec(cur.vec(e), sb.D, sb.D));
    double sc = 0;
    for (const auto& e : el) sc = std::max(sc, e.norm());
    std::vector<std::pair<int, int>> still;
    for (auto ij : pending) {
      int rows = 0;
      size_t pos = 0;
      while (order[pos] != ij) {
        rows += sb.sizes[order[pos].first] * sb.sizes[order[pos].second];
        ++pos;
      }
      CMatrix c(rows, el.size());
      int off = 0;
      for (size_t t = 0; t < pos; ++t) {
        const int r = sb.sizes[order[t].first] * sb.sizes[order[t].second];
        for (size_t e = 0; e < el.size(); ++e) c.block(off, e, r, 1) = vec(sb.block(el[e], order[t].first, order[t].second));
        off += r;
      }
      CMatrix y(sb.sizes[ij.first] * sb.sizes[ij.second], el.size());
      for (size_t e = 0; e < el.size(); ++e) y.col(e) = vec(sb.block(el[e], ij.first, ij.second));
      CMatrix ker = nullspace(c, opt.tol);
      if (ker.cols() > 0 && (y * ker).norm() > zero_tol(opt) * std::max(sc, 1e-300))
        sb.m[ij] = l;
      else
        still.push_back(ij);
    }
    pending.swap(still);
  }
}

}  // namespace

StructuredBasis build_structured_basis(const StructureAnalysis& sa, BasisMode mode, int ell, const Options& opt) {
  const auto& tri = sa.tri;
  const int D = tri.part.D;
  Work w;
  w.b = tri.part.b();
  w.sizes = tri.part.sizes;
  w.offsets = tri.part.offsets;
  w.P = tri.part.P;
  w.Pinv = tri.part.Pinv;
  if (mode == BasisMode::Algebra) {
    w.el = generate_algebra(tri.gauged, opt.tol).elements();
    ell = 0;
  } else {
    if (ell < 1) throw Error(ErrorKind::InvalidInput, "span mode needs a length >= 1");
    w.el = span_fixed_length(tri.gauged, ell, opt.tol).elements();
  }
  for (const auto& e : w.el) w.scale = std::max(w.scale, e.norm());
  const double zt = zero_tol(opt) * std::max(w.scale, 1e-300);
  const double rt = 1e-8;
  const int b = w.b;

  // diagonal classes within the subspace
  std::vector<int> cls(b, -1);
  std::vector<cplx> mu(b, cplx(0));
  std::vector<int> reps;
  CMatrix t = CMatrix::Identity(D, D), ti = CMatrix::Identity(D, D);
  int n_inf = 0;
  std::vector<int> rep_of_class;
  for (int j = 0; j < b; ++j) {
    CMatrix yj = w.block_cols(j, j);
    if (yj.norm() <= zt) continue;
    const int dj = w.sizes[j];
    bool found = false;
    for (int r : reps) {
      if (w.sizes[r] != dj) continue;
      CMatrix yr = w.block_cols(r, r);
      CMatrix both(yr.rows() * 2, yr.cols());
      both << yr, yj;
      if (rank(both, rt) != rank(yr, rt)) continue;
      CMatrix f = lstsq(yr.transpose(), yj.transpose(), 1e-10).transpose();
      cplx m;
      CMatrix z;
      if (!extract_automorphism(f, dj, m, z))
        throw Error(ErrorKind::StructureUncertain,
                    "diagonal block " + std::to_string(j) + " depends on block " + std::to_string(r) +
                        " but not through a conjugation");
      cls[j] = cls[r];
      mu[j] = m;
      t.block(w.offsets[j], w.offsets[j], dj, dj) = z.inverse();
      ti.block(w.offsets[j], w.offsets[j], dj, dj) = z;
      found = true;
      break;
    }
    if (!found) {
      if (rank(yj, rt) != dj * dj)
        throw Error(ErrorKind::StructureUncertain,
                    "diagonal block " + std::to_string(j) + " is neither full nor related to an earlier block");
      cls[j] = n_inf++;
      mu[j] = 1;
      reps.push_back(j);
      rep_of_class.push_back(j);
    }
  }
  w.gauge(t, ti);

  StructuredBasis sb;
  sb.mode = mode;
  sb.ell = ell;
  sb.D = D;
  sb.sizes = w.sizes;
  sb.offsets = w.offsets;
  sb.block_class = cls;
  sb.block_mu = mu;
  sb.n_inf = n_inf;
  for (int c = 0; c < n_inf; ++c) {
    Label l;
    l.name = std::to_string(c);
    l.diagonal = true;
    l.cls = c;
    l.r1 = l.r2 = c;
    l.i0 = l.j0 = rep_of_class[c];
    l.rows = l.cols = w.sizes[rep_of_class[c]];
    sb.labels.push_back(l);
  }
  // k grows as labels are added
  auto k_at = [&](int i, int j, int e) -> cplx& {
    auto& v = sb.k[i][j];
    if (static_cast<int>(v.size()) <= e) v.resize(e + 1, cplx(0));
    return v[e];
  };
  sb.k.assign(b, std::vector<std::vector<cplx>>(b));
  for (int j = 0; j < b; ++j)
    if (cls[j] >= 0) k_at(j, j, cls[j]) = mu[j];

  for (int dl = 1; dl < b; ++dl)
    for (int i = 0; i + dl < b; ++i) {
      const int j = i + dl;
      const int di = w.sizes[i], dj = w.sizes[j];
      CMatrix c = coordinate_matrix(w, sb.labels);
      CMatrix y = w.block_cols(i, j);
      CMatrix ker = nullspace(c, opt.tol);
      CMatrix yk = y * ker;
      if (ker.cols() > 0 && yk.norm() > zt) {
        if (rank(yk, rt) != di * dj)
          throw Error(ErrorKind::StructureUncertain, "block (" + std::to_string(i) + "," + std::to_string(j) +
                                                         ") is isolatable but not a full free block");
        Label l;
        l.name = std::to_string(sb.labels.size());
        l.r1 = cls[i];
        l.r2 = cls[j];
        l.i0 = i;
        l.j0 = j;
        l.rows = di;
        l.cols = dj;
        sb.labels.push_back(l);
        k_at(i, j, static_cast<int>(sb.labels.size()) - 1) = 1;
        continue;
      }
      CMatrix f = lstsq(c.transpose(), y.transpose(), 1e-10).transpose();
      OffDiagSolution sol = solve_offdiag(w, sb.labels, cls, mu, i, j, f, false, mode);
      if (!sol.ok && mode == BasisMode::Span) sol = solve_offdiag(w, sb.labels, cls, mu, i, j, f, true, mode);
      if (!sol.ok)
        throw Error(ErrorKind::StructureUncertain, "block (" + std::to_string(i) + "," + std::to_string(j) +
                                                       ") is not a combination of free blocks in its sector");
      CMatrix g = CMatrix::Identity(D, D), gi = CMatrix::Identity(D, D);
      g.block(w.offsets[i], w.offsets[j], di, dj) = sol.ptilde;
      gi.block(w.offsets[i], w.offsets[j], di, dj) = -sol.ptilde;
      w.gauge(g, gi);
      for (const auto& [e, val] : sol.k)
        if (std::abs(val) > 1e-10) k_at(i, j, e) = val;
    }

  const int n = sb.n_labels();
  for (auto& row : sb.k)
    for (auto& v : row) v.resize(n, cplx(0));
  sb.P = w.P;
  sb.Pinv = w.Pinv;
  sb.elements = w.el;

  // every element must be reproduced by its label contents
  for (const auto& e : sb.elements) {
    const double res = (sb.reconstruct(sb.decompose(e)) - e).norm();
    if (res > 1e-7 * std::max(w.scale, 1e-300))
      throw Error(ErrorKind::StructureUncertain, "structured basis does not reproduce the subspace, residual " +
                                                     std::to_string(res));
  }

  std::vector<CMatrix> letters;
  for (const auto& a : sa.effective.mats) letters.push_back(sb.P * a * sb.Pinv);
  isolatability(sb, letters, opt);
  return sb;
}

CMatrix identity0(const StructuredBasis& basis) {
  CMatrix id = CMatrix::Zero(basis.D, basis.D);
  for (int j = 0; j < basis.b(); ++j)
    if (basis.block_class[j] >= 0)
      id.block(basis.offsets[j], basis.offsets[j], basis.sizes[j], basis.sizes[j]).setIdentity();
  return basis.Pinv * id * basis.P;
}

double GammaTensor::associativity_residual() const {
  double r = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cplx lhs = 0, rhs = 0;
          for (int m = 0; m < n; ++m) {
            lhs += (*this)(i, j, m) * (*this)(m, k, l);
            rhs += (*this)(j, k, m) * (*this)(i, m, l);
          }
          r = std::max(r, std::abs(lhs - rhs));
        }
  return r;
}

GammaTensor gamma_tensor(const StructuredBasis& basis, double tol) {
  (void)tol;
  const int n = basis.n_labels();
  const int b = basis.b();
  GammaTensor g;
  g.n = n;
  g.g.assign(static_cast<size_t>(n) * n * n, cplx(0));
  std::vector<CMatrix> low;
  CMatrix cols(b * b, n);
  for (int e = 0; e < n; ++e) {
    low.push_back(basis.a_low(e));
    cols.col(e) = vec(low.back());
  }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      CVector prod = vec(low[p] * low[q]);
      CVector c = lstsq(cols, prod, 1e-10);
      const double res = (cols * c - prod).norm();
      if (res > 1e-8 * std::max(1.0, prod.norm())) {
        if (basis.mode == BasisMode::Span)
          throw Error(ErrorKind::InvalidMode, "span basis is not closed under products; Gamma needs matching lengths");
        throw Error(ErrorKind::StructureUncertain, "lower algebra not closed, residual " + std::to_string(res));
      }
      for (int r = 0; r < n; ++r) g(p, q, r) = std::abs(c(r)) < 1e-12 ? cplx(0) : c(r);
    }
  return g;
}

GammaChecks check_gamma(const StructuredBasis& basis, const GammaTensor& gamma) {
  GammaChecks out;
  const int n = gamma.n;
  const auto& L = basis.labels;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r) {
        const cplx v = gamma(p, q, r);
        if (L[p].diagonal && L[q].diagonal) {
          const cplx want = (p == q && q == r) ? cplx(1) : cplx(0);
          out.p1 = std::max(out.p1, std::abs(v - want));
        }
        if (!L[p].diagonal && !L[q].diagonal && L[r].diagonal) out.p2 = std::max(out.p2, std::abs(v));
        if (std::abs(v) > 1e-9) {
          const bool fits = L[p].r2 == L[q].r1 && L[r].r1 == L[p].r1 && L[r].r2 == L[q].r2;
          if (!fits) out.p3 = std::max(out.p3, std::abs(v));
        }
      }
  out.assoc = gamma.associativity_residual();
  return out;
}

MatrixCF matrix_cf(const MatrixSet& s, const StructuredBasis& basis, int ell, double tol) {
  MatrixCF cf;
  cf.basis = basis;
  cf.ell = ell;
  std::vector<CMatrix> g;
  double sc = 0;
  for (const auto& a : s.mats) {
    g.push_back(basis.P * a * basis.Pinv);
    sc = std::max(sc, a.norm());
  }
  cf.gauged = MatrixSet(g);
  for (const auto& a : g) {
    cf.a_up.push_back(basis.decompose(a));
    cf.residual = std::max(cf.residual, (basis.reconstruct(cf.a_up.back()) - a).norm());
  }
  if (cf.residual > std::max(tol, 1e-12) * 100 * std::max(sc, 1.0))
    throw Error(ErrorKind::InconsistentBasis, "letters lie outside the structured basis, residual " +
                                                  std::to_string(cf.residual));
  std::vector<CMatrix> low;
  for (int e = 0; e < basis.n_labels(); ++e) low.push_back(basis.a_low(e));
  cf.a_low = MatrixSet(low);
  return cf;
}

BlockInjectivity block_injectivity_length(const MatrixCF& cf, int l_max, long cap, double tol) {
  BlockInjectivity out;
  const auto& basis = cf.basis;
  const int nc = basis.n_coords();
  std::vector<CMatrix> cur = cf.gauged.mats;
  for (int l = 1; l <= l_max; ++l) {
    if (l > 1) {
      if (static_cast<double>(cur.size()) * cf.gauged.d > static_cast<double>(cap))
        throw Error(ErrorKind::CapExceeded, "block-injectivity probe exceeds the physical blocking cap " +
                                                std::to_string(cap));
      std::vector<CMatrix> next;
      next.reserve(cur.size() * cf.gauged.d);
      for (const auto& a : cur)
        for (const auto& x : cf.gauged.mats) next.push_back(a * x);
      cur.swap(next);
    }
    CMatrix m(cur.size(), nc);
    for (size_t w = 0; w < cur.size(); ++w) {
      auto parts = basis.decompose(cur[w]);
      int off = 0;
      for (const auto& p : parts) {
        CVector v = vec(p);
        m.block(w, off, 1, v.size()) = v.transpose();
        off += static_cast<int>(v.size());
      }
    }
    if (rank(m, std::max(tol, 1e-10)) == nc) {
      Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(m);
      CMatrix left = cod.pseudoInverse();
      out.length = l;
      out.certificate_residual = max_abs(left * m - CMatrix::Identity(nc, nc));
      return out;
    }
  }
  return out;
}

}  // namespace mpsx
