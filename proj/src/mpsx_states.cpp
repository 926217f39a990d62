/** @file mpsx_states.cpp
 * Amplitudes, translational invariance, boundary simplification and gCF assembly.
 */
#include "mpsx/mpsx_states.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace mpsx {

MpsX::MpsX(MatrixSet s, CMatrix x) : tensor(std::move(s)), X(std::move(x)) {
  if (X.rows() != tensor.D || X.cols() != tensor.D)
    throw Error(ErrorKind::InvalidInput, "boundary must be a square matrix of the bond dimension");
}

CVector generate_state(const MpsX& m, int N, long cap) {
  if (N < 0) throw Error(ErrorKind::InvalidInput, "negative system size");
  const double count = std::pow(static_cast<double>(m.d()), N);
  if (count > static_cast<double>(cap))
    throw Error(ErrorKind::CapExceeded, "d^N = " + std::to_string(static_cast<long long>(count)) +
                                            " exceeds the amplitude cap " + std::to_string(cap));
  const long total = static_cast<long>(count);
  CVector out(total);
  if (N == 0) {
    out[0] = m.X.trace();
    return out;
  }
  // depth-first over words, carrying X A^{w1} ... A^{wk}
  std::vector<CMatrix> stack(N + 1);
  stack[0] = m.X;
  long idx = 0;
  std::function<void(int)> rec = [&](int depth) {
    for (int x = 0; x < m.d(); ++x) {
      if (depth + 1 == N) {
        out[idx++] = (stack[depth] * m.tensor[x]).trace();
      } else {
        stack[depth + 1] = stack[depth] * m.tensor[x];
        rec(depth + 1);
      }
    }
  };
  rec(0);
  return out;
}

bool ti_check_general(const MpsX& m, double tol) {
  const AlgebraRep alg = generate_algebra(m.tensor, tol);
  const auto el = alg.elements();
  const double scale = std::max(1.0, max_abs(m.X));
  for (size_t k = 0; k < el.size(); ++k)
    for (size_t l = k + 1; l < el.size(); ++l)
      if (std::abs((m.X * (el[k] * el[l] - el[l] * el[k])).trace()) > 100 * tol * scale) return false;
  return true;
}

TiReport simplify_boundary(const MpsX& m, const StructuredBasis& basis, const GammaTensor& g, double tol) {
  TiReport r;
  const CMatrix xg = basis.P * m.X * basis.Pinv;
  const double thresh = 100 * tol * std::max(1.0, max_abs(xg));
  const int n = basis.n_labels();
  const int b = basis.b();
  r.beta.assign(n, 0);
  r.residual_i.assign(n, 0);
  r.y = CMatrix::Zero(b, b);
  CMatrix xt = CMatrix::Zero(basis.D, basis.D);
  bool ok = true;
  for (int t = 0; t < n; ++t) {
    const Label& lab = basis.labels[t];
    CMatrix s = CMatrix::Zero(lab.cols, lab.rows);
    for (int i = 0; i < b; ++i)
      for (int j = i; j < b; ++j) {
        const cplx k = basis.k[i][j][t];
        if (k != cplx(0)) s += k * basis.block(xg, j, i);
      }
    if (lab.r1 == lab.r2) {
      const cplx beta = s.diagonal().mean();
      r.residual_i[t] = max_abs(s - beta * CMatrix::Identity(s.rows(), s.cols()));
      const double re = std::abs(beta.real()) > thresh ? beta.real() : 0.0;
      const double im = std::abs(beta.imag()) > thresh ? beta.imag() : 0.0;
      r.beta[t] = cplx(re, im);
    } else {
      r.residual_i[t] = max_abs(s);
    }
    ok = ok && r.residual_i[t] <= thresh;
  }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (basis.labels[p].diagonal || basis.labels[q].diagonal) continue;
      cplx v = 0;
      for (int t = 0; t < n; ++t)
        if (!basis.labels[t].diagonal) v += r.beta[t] * (g(p, q, t) - g(q, p, t));
      r.residual_ii = std::max(r.residual_ii, std::abs(v));
    }
  ok = ok && r.residual_ii <= thresh;
  r.is_ti = ok;
  for (int t = 0; t < n; ++t) {
    const Label& lab = basis.labels[t];
    if (r.beta[t] == cplx(0)) continue;
    r.y(lab.j0, lab.i0) = r.beta[t];
    xt.block(basis.offsets[lab.j0], basis.offsets[lab.i0], lab.cols, lab.rows) =
        r.beta[t] * CMatrix::Identity(lab.cols, lab.rows);
  }
  r.x_tilde = basis.Pinv * xt * basis.P;
  return r;
}

std::map<std::string, cplx> GcfResult::beta_values() const {
  std::map<std::string, cplx> out;
  for (size_t t = 0; t < ti.beta.size(); ++t) out["b" + cf.basis.labels[t].name] = ti.beta[t];
  return out;
}

GcfResult assemble_gcf(const MpsX& m, const Options& opt) {
  GcfResult res;
  res.stability = check_stability(m.tensor, opt);
  if (!res.stability.stable())
    throw Error(ErrorKind::NotStable, std::string("stability verdict ") + verdict_name(res.stability.verdict) +
                                          (res.stability.witness.empty() ? "" : " (" + res.stability.witness + ")"));
  res.block_length = static_cast<int>(res.stability.stable_length);
  res.blocked = res.block_length == 1 ? m : MpsX(block_physical(m.tensor, res.block_length, opt.cap_phys), m.X);

  StructureAnalysis sa = analyze_structure(res.blocked.tensor, opt);
  if (sa.p != 1) throw Error(ErrorKind::StructureUncertain, "blocked tensor is still periodic");
  StructuredBasis basis = build_structured_basis(sa, BasisMode::Algebra, 1, opt);
  res.cf = matrix_cf(res.blocked.tensor, basis, 1, opt.tol);
  res.gamma = gamma_tensor(res.cf.basis, opt.tol);
  res.ti = simplify_boundary(res.blocked, res.cf.basis, res.gamma, opt.tol);
  if (!res.ti.is_ti) throw Error(ErrorKind::NotTI, "boundary violates the translation-invariance conditions");

  const StructuredBasis& sb = res.cf.basis;
  const int b = sb.b();
  const int n = sb.n_labels();
  std::vector<std::vector<Weight>> ysym(b, std::vector<Weight>(b));
  for (int t = 0; t < n; ++t) {
    if (res.ti.beta[t] == cplx(0)) continue;
    ysym[sb.labels[t].j0][sb.labels[t].i0].params["b" + sb.labels[t].name] = 1;
  }
  res.backbone = extract_backbone(ysym, res.cf.a_low, opt.tol);
  res.backbone_values = extract_backbone(res.ti.y, res.cf.a_low, opt.tol);

  // class space: one slot of the representative size per class, one scalar slot for the vanishing class
  std::vector<int> cls_off(sb.n_inf + 1, 0), cls_size(sb.n_inf + 1, 0);
  for (int i = 0; i < b; ++i) {
    const int c = sb.block_class[i] < 0 ? sb.n_inf : sb.block_class[i];
    cls_size[c] = sb.sizes[i];
  }
  int dup = 0;
  for (int c = 0; c <= sb.n_inf; ++c) {
    cls_off[c] = dup;
    dup += cls_size[c];
  }
  auto slot = [&](int c) { return c < 0 ? sb.n_inf : c; };
  const int d = res.blocked.d();
  res.upper.assign(d, std::vector<CMatrix>(n, CMatrix::Zero(dup, dup)));
  for (int x = 0; x < d; ++x)
    for (int t = 0; t < n; ++t) {
      const Label& lab = sb.labels[t];
      res.upper[x][t].block(cls_off[slot(lab.r1)], cls_off[slot(lab.r2)], lab.rows, lab.cols) = res.cf.a_up[x][t];
    }

  try {
    res.injectivity = block_injectivity_length(res.cf, std::max(1, sb.D * sb.D), opt.cap_phys, opt.tol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::CapExceeded) throw;
  }

  const MpsX backbone = rls_to_mpsx(res.backbone_values);
  std::vector<CMatrix> comp(d, CMatrix::Zero(backbone.D() * dup, backbone.D() * dup));
  for (int x = 0; x < d; ++x)
    for (int t = 0; t < n; ++t) comp[x] += kron(backbone.tensor[t], res.upper[x][t]);
  res.composed = MpsX(MatrixSet(comp), kron(backbone.X, CMatrix::Identity(dup, dup)));

  for (int N = 1; N <= opt.verify_n; ++N) {
    if (std::pow(static_cast<double>(d), N) > static_cast<double>(opt.amp_cap)) break;
    const CVector a = generate_state(res.blocked, N, opt.amp_cap);
    const CVector c = generate_state(res.composed, N, opt.amp_cap);
    const double scale = max_abs(a);
    const double diff = max_abs(a - c);
    res.verify_residuals.push_back(scale > 0 ? diff / scale : diff);
  }
  for (double r : res.verify_residuals)
    if (r > 1e-6) throw Error(ErrorKind::InconsistentBasis, "gCF does not reproduce the family");

  res.gamma_invariant = true;
  for (int alpha = 1; alpha <= 2; ++alpha)
    for (int beta = 1; beta <= 3; ++beta) {
      if (std::pow(static_cast<double>(n), alpha * beta) > static_cast<double>(opt.amp_cap)) continue;
      res.gamma_invariant =
          res.gamma_invariant && gamma_block_check(res.backbone_values, res.gamma, alpha, beta, opt.amp_cap, 1e-7);
    }
  return res;
}

}  // namespace mpsx
