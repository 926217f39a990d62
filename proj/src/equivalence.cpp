/** @file equivalence.cpp
 * Weighted-automaton equality, negligible blocks, reduced pairs and stacking relations.
 */
#include "mpsx/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

namespace mpsx {

cplx Wfa::weight(const std::vector<int>& word) const {
  CMatrix v = initial;
  for (int x : word) v = v * transition.at(x);
  return (v * final_)(0, 0);
}

Wfa to_wfa(const MpsX& m, std::uint64_t seed) {
  const int D = m.D();
  Wfa w;
  w.d = m.d();
  w.n = D * D;
  w.initial = vec(m.X).transpose();
  const CMatrix id = CMatrix::Identity(D, D);
  for (int x = 0; x < w.d; ++x) w.transition.push_back(kron(id, m.tensor[x]));
  w.final_ = vec(id);

  // spot check against the trace formula
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> letter(0, w.d - 1), len(1, 6);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<int> word(len(rng));
    for (int& x : word) x = letter(rng);
    const cplx direct = (m.X * word_product(m.tensor, word)).trace();
    const double scale = std::max(1.0, std::abs(direct));
    if (std::abs(direct - w.weight(word)) > 1e-8 * scale)
      throw Error(ErrorKind::InconsistentBasis, "automaton does not reproduce the amplitudes");
  }
  return w;
}

WfaComparison wfa_compare(const Wfa& a, const Wfa& b, double tol) {
  if (a.d != b.d) throw Error(ErrorKind::InvalidInput, "physical dimensions differ");
  const int n = a.n + b.n;
  const int d = a.d;
  std::vector<CMatrix> t(d, CMatrix::Zero(n, n));
  for (int x = 0; x < d; ++x) {
    t[x].topLeftCorner(a.n, a.n) = a.transition[x];
    t[x].bottomRightCorner(b.n, b.n) = b.transition[x];
  }
  CVector f(n);
  f.head(a.n) = a.final_.col(0);
  f.tail(b.n) = -b.final_.col(0);
  CVector u(n);
  u.head(a.n) = a.initial.row(0).transpose();
  u.tail(b.n) = b.initial.row(0).transpose();
  const double fscale = std::max(1.0, f.norm());

  WfaComparison out;
  VectorSpace span;
  span.ambient_dim = n;
  span.basis = CMatrix::Zero(n, 0);
  span.tol = tol;
  std::deque<std::pair<CVector, std::vector<int>>> queue;
  auto visit = [&](const CVector& v, const std::vector<int>& word) -> bool {
    const double nv = v.norm();
    if (nv == 0) return true;
    CVector r = v;
    if (span.dim() > 0) r -= span.basis * (span.basis.adjoint() * r);
    if (r.norm() <= tol * nv) return true;
    const CVector q = r / r.norm();
    span.basis.conservativeResize(Eigen::NoChange, span.dim() + 1);
    span.basis.col(span.dim() - 1) = q;
    const CVector vn = v / nv;
    if (std::abs(vn.dot(f.conjugate())) > tol * fscale) {
      out.equal = false;
      out.word = word;
      return false;
    }
    queue.emplace_back(vn, word);
    return true;
  };
  // nonempty words only: seed with the single letters
  for (int x = 0; x < d; ++x)
    if (!visit((u.transpose() * t[x]).transpose(), {x})) break;
  while (out.equal && !queue.empty()) {
    auto [v, word] = queue.front();
    queue.pop_front();
    for (int x = 0; x < d && out.equal; ++x) {
      std::vector<int> next = word;
      next.push_back(x);
      visit((v.transpose() * t[x]).transpose(), next);
    }
  }
  out.explored = span.dim();
  return out;
}

bool wfa_equal(const Wfa& a, const Wfa& b, double tol) { return wfa_compare(a, b, tol).equal; }

std::string word_string(const std::vector<int>& word, int d) {
  std::string s;
  for (size_t i = 0; i < word.size(); ++i) {
    if (d > 10 && i > 0) s += ",";
    s += std::to_string(word[i]);
  }
  return s;
}

MpsX zero_blocks(const MpsX& m, const MatrixCF& cf, const std::vector<int>& labels) {
  const StructuredBasis& sb = cf.basis;
  std::vector<CMatrix> out;
  for (int x = 0; x < m.d(); ++x) {
    std::vector<CMatrix> contents = cf.a_up[x];
    for (int t : labels) contents[t].setZero();
    out.push_back(sb.reconstruct(contents));
  }
  return MpsX(MatrixSet(out), sb.P * m.X * sb.Pinv);
}

std::vector<int> negligible_blocks(const MpsX& m, const MatrixCF& cf, double tol) {
  if (cf.ell != 1 || static_cast<int>(cf.a_up.size()) != m.d())
    throw Error(ErrorKind::InvalidInput, "matrix-CF does not belong to the tensor");
  const Wfa ref = to_wfa(MpsX(cf.gauged, cf.basis.P * m.X * cf.basis.Pinv));
  std::vector<int> out;
  for (int t = 0; t < cf.basis.n_labels(); ++t)
    if (wfa_equal(to_wfa(zero_blocks(m, cf, {t})), ref, tol)) out.push_back(t);
  return out;
}

VectorSpace physical_subspace(const MatrixSet& s, double tol) {
  // row i of the transpose is vec(A^i); the span of (Tr[Y A^i])_i is the column space of that d x D^2 matrix
  CMatrix m(s.d, s.D * s.D);
  for (int i = 0; i < s.d; ++i) m.row(i) = vec(s[i]).transpose();
  return orthonormalize_columns(m, s.d, tol);
}

namespace {

MatrixSet project_leg(const MatrixSet& s, const CMatrix& proj) {
  std::vector<CMatrix> out(s.d, CMatrix::Zero(s.D, s.D));
  for (int i = 0; i < s.d; ++i)
    for (int j = 0; j < s.d; ++j)
      if (proj(i, j) != cplx(0)) out[i] += proj(i, j) * s[j];
  return MatrixSet(out);
}

}  // namespace

ReducedPair reduce_pair(const MpsX& a, const MpsX& b, double tol) {
  if (a.d() != b.d()) throw Error(ErrorKind::InvalidInput, "physical dimensions differ");
  const WfaComparison cmp = wfa_compare(to_wfa(a), to_wfa(b));
  if (!cmp.equal)
    throw Error(ErrorKind::NotEquivalent, "families differ on word " + word_string(cmp.word, a.d()));
  ReducedPair r{a, b, {}, {}};
  r.common = intersect(physical_subspace(a.tensor, tol), physical_subspace(b.tensor, tol));
  r.projector = r.common.projector();
  for (int i = 0; i < r.projector.rows(); ++i)
    for (int j = 0; j < r.projector.cols(); ++j) {
      cplx& v = r.projector(i, j);
      v = cplx(std::abs(v.real()) < 1e-14 ? 0.0 : v.real(), std::abs(v.imag()) < 1e-14 ? 0.0 : v.imag());
    }
  r.a = MpsX(project_leg(a.tensor, r.projector), a.X);
  r.b = MpsX(project_leg(b.tensor, r.projector), b.X);
  if (!wfa_equal(to_wfa(r.a), to_wfa(a)) || !wfa_equal(to_wfa(r.b), to_wfa(b)))
    throw Error(ErrorKind::InconsistentBasis, "projection changed the family");
  return r;
}

namespace {

MatrixCF span_cf(const MpsX& m, int ell, const Options& opt) {
  const MatrixSet letters = ell == 1 ? m.tensor : block_physical(m.tensor, ell, opt.cap_phys);
  const StructureAnalysis sa = analyze_structure(m.tensor, opt);
  if (sa.p != 1) throw Error(ErrorKind::StructureUncertain, "stacking requires period one");
  const StructuredBasis basis = build_structured_basis(sa, BasisMode::Span, ell, opt);
  return matrix_cf(letters, basis, ell, opt.tol);
}

int diagonal_label(const StructuredBasis& sb, int cls) {
  for (int t = 0; t < sb.n_labels(); ++t)
    if (sb.labels[t].diagonal && sb.labels[t].cls == cls) return t;
  throw Error(ErrorKind::InconsistentBasis, "class without a diagonal label");
}

// one row per coordinate, one column per letter
CMatrix coordinates(const MatrixCF& cf, std::vector<std::string>& names) {
  const StructuredBasis& sb = cf.basis;
  CMatrix out(sb.n_coords(), cf.a_up.size());
  int row = 0;
  for (int t = 0; t < sb.n_labels(); ++t) {
    const Label& lab = sb.labels[t];
    for (int r = 0; r < lab.rows; ++r)
      for (int c = 0; c < lab.cols; ++c, ++row) {
        names.push_back(lab.rows * lab.cols == 1
                            ? lab.name
                            : lab.name + "[" + std::to_string(r) + "," + std::to_string(c) + "]");
        for (size_t x = 0; x < cf.a_up.size(); ++x) out(row, x) = cf.a_up[x][t](r, c);
      }
  }
  return out;
}

cplx chop(cplx v) {
  return {std::abs(v.real()) < 1e-12 ? 0.0 : v.real(), std::abs(v.imag()) < 1e-12 ? 0.0 : v.imag()};
}

}  // namespace

GaugeRelation stack_and_relate(const MpsX& a, const MpsX& b, int ell, const Options& opt) {
  if (a.d() != b.d()) throw Error(ErrorKind::InvalidInput, "physical dimensions differ");
  const MatrixCF ca = span_cf(a, ell, opt);
  const MatrixCF cb = span_cf(b, ell, opt);
  const StructuredBasis& sa = ca.basis;
  const StructuredBasis& sb = cb.basis;
  const int letters = static_cast<int>(ca.a_up.size());

  GaugeRelation rel;
  rel.pi.assign(sb.n_inf, -1);
  rel.alpha.assign(sb.n_inf, 1);
  rel.z.resize(sb.n_inf);
  for (int j = 0; j < sb.n_inf; ++j) {
    std::vector<CMatrix> bj;
    const int tb = diagonal_label(sb, j);
    for (int x = 0; x < letters; ++x) bj.push_back(cb.a_up[x][tb]);
    for (int i = 0; i < sa.n_inf && rel.pi[j] < 0; ++i) {
      const int ta = diagonal_label(sa, i);
      if (sa.labels[ta].rows != sb.labels[tb].rows) continue;
      std::vector<CMatrix> ai;
      for (int x = 0; x < letters; ++x) ai.push_back(ca.a_up[x][ta]);
      cplx mu;
      CMatrix z;
      if (relate_blocks(ai, bj, mu, z, opt.tol)) {
        rel.pi[j] = i;
        rel.alpha[j] = mu;
        rel.z[j] = z;
      }
    }
    if (rel.pi[j] < 0)
      throw Error(ErrorKind::RelationNotFound, "class " + std::to_string(j) + " of the second tensor has no partner");
  }

  // C coordinates: those of A, then those of B that A cannot express as functions of the letter
  const CMatrix ka = coordinates(ca, rel.c_labels);
  const CMatrix kb = coordinates(cb, rel.b_labels);
  double scale = 1.0;
  for (int r = 0; r < kb.rows(); ++r) scale = std::max(scale, kb.row(r).norm());
  const double thresh = 1e-7 * scale;
  VectorSpace rows = orthonormalize_columns(ka.transpose(), letters, opt.tol);
  std::vector<CVector> extra;
  int next_name = 0;
  for (const auto& lab : sa.labels) next_name = std::max(next_name, std::atoi(lab.name.c_str()) + 1);
  for (int s = 0; s < kb.rows(); ++s) {
    const CVector v = kb.row(s).transpose();
    if (v.norm() <= thresh || residual(rows, v) <= thresh) continue;
    extend(rows, {v}, scale);
    extra.push_back(v);
    rel.c_labels.push_back(std::to_string(next_name++));
  }
  rel.n_extra = static_cast<int>(extra.size());

  CMatrix kc(ka.rows() + rel.n_extra, letters);
  kc.topRows(ka.rows()) = ka;
  for (int e = 0; e < rel.n_extra; ++e) kc.row(ka.rows() + e) = extra[e].transpose();
  // kb = P_B^T kc, solved column by column of P_B
  rel.p_b = lstsq(kc.transpose(), kb.transpose(), opt.tol);
  rel.residual = max_abs(rel.p_b.transpose() * kc - kb) / scale;
  for (int i = 0; i < rel.p_b.rows(); ++i)
    for (int j = 0; j < rel.p_b.cols(); ++j) rel.p_b(i, j) = chop(rel.p_b(i, j));
  if (rel.residual > 1e-7)
    throw Error(ErrorKind::RelationNotFound, "upper contents of the second tensor are not expressible");
  return rel;
}

}  // namespace mpsx
