#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fixtures.hpp"
#include "mpsx/mpsx_states.hpp"

using namespace mpsx;

namespace {

/// psi(w) == psi(rotate(w)) for every word of length <= n_max.
bool shift_invariant(const MpsX& m, int n_max) {
  for (int N = 2; N <= n_max; ++N) {
    const CVector s = generate_state(m, N);
    const double scale = std::max(1.0, max_abs(s));
    long top = 1;
    for (int k = 1; k < N; ++k) top *= m.d();
    for (long k = 0; k < s.size(); ++k) {
      const long rot = (k % top) * m.d() + k / top;  // first letter moved to the end
      if (std::abs(s[k] - s[rot]) > 1e-8 * scale) return false;
    }
  }
  return true;
}

double state_diff(const MpsX& a, const MpsX& b, int n_max) {
  double worst = 0;
  for (int N = 1; N <= n_max; ++N) {
    const CVector sa = generate_state(a, N), sb = generate_state(b, N);
    worst = std::max(worst, max_abs(sa - sb) / std::max(1.0, max_abs(sa)));
  }
  return worst;
}

/// Original family at N * L sites against the gCF family at N blocked sites.
double gcf_diff(const MpsX& m, const GcfResult& g, long cap = 1L << 16) {
  double worst = 0;
  for (int N = 1;; ++N) {
    if (std::pow(static_cast<double>(m.d()), N * g.block_length) > static_cast<double>(cap)) break;
    const CVector a = generate_state(m, N * g.block_length), b = generate_state(g.composed, N);
    worst = std::max(worst, max_abs(a - b) / std::max(1.0, max_abs(a)));
  }
  return worst;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidInput;
}

/// Translation-invariant boundary X = P^-1 Xt P with Xt_{j_t i_t} = beta_t I for labels with equal sector classes.
CMatrix ti_boundary(const MatrixSet& s, const std::vector<cplx>& beta, CMatrix noise = CMatrix()) {
  StructureAnalysis sa = analyze_structure(s);
  StructuredBasis sb = build_structured_basis(sa, BasisMode::Algebra);
  CMatrix xt = CMatrix::Zero(sb.D, sb.D);
  for (int t = 0; t < sb.n_labels(); ++t) {
    const Label& l = sb.labels[t];
    if (l.r1 != l.r2 || t >= static_cast<int>(beta.size())) continue;
    xt.block(sb.offsets[l.j0], sb.offsets[l.i0], l.cols, l.rows) = beta[t] * CMatrix::Identity(l.cols, l.rows);
  }
  if (noise.size()) xt += noise;  // strictly block-lower-triangular-free additions only
  return sb.Pinv * xt * sb.P;
}

MatrixSet block_diagonal(const std::vector<MatrixSet>& parts) {
  int D = 0;
  for (const auto& p : parts) D += p.D;
  std::vector<CMatrix> out(parts[0].d, CMatrix::Zero(D, D));
  int off = 0;
  for (const auto& p : parts) {
    for (int x = 0; x < p.d; ++x) out[x].block(off, off, p.D, p.D) = p[x];
    off += p.D;
  }
  return MatrixSet(out);
}

}  // namespace

TEST_CASE("amplitudes of small families") {
  MpsX w(fx::w_tensor(), fx::w_boundary());
  const CVector s = generate_state(w, 3);
  for (long k = 0; k < 8; ++k) CHECK(s[k] == cplx((k == 1 || k == 2 || k == 4) ? 1 : 0));

  MpsX zero(fx::w_tensor(), CMatrix::Zero(2, 2));
  CHECK(max_abs(generate_state(zero, 5)) == 0);

  MpsX ghz(fx::ghz_tensor(), CMatrix::Identity(2, 2));
  const CVector g = generate_state(ghz, 4);
  for (long k = 0; k < 16; ++k) CHECK(g[k] == cplx((k == 0 || k == 15) ? 1 : 0));

  for (int trial = 0; trial < 4; ++trial) {
    MatrixSet r = fx::random_set(2 + trial % 2, 3);
    CMatrix x = fx::random_matrix(3, 3);
    MpsX m(r, x);
    for (int N = 1; N <= 5; ++N)
      CHECK(oracle::max_diff(fx::to_std(generate_state(m, N)), oracle::amplitudes(fx::to_oracle(x), fx::to_oracle(r), N)) <
            1e-10);
  }
  CHECK(kind_of([&] { generate_state(w, 21); }) == ErrorKind::CapExceeded);
  CHECK(kind_of([&] { generate_state(w, 8, 100); }) == ErrorKind::CapExceeded);
  CHECK(kind_of([&] { MpsX(fx::w_tensor(), CMatrix::Zero(3, 3)); }) == ErrorKind::InvalidInput);
}

TEST_CASE("translation invariance by commutators") {
  CHECK(ti_check_general(MpsX(fx::random_set(2, 3), CMatrix::Identity(3, 3))));
  CHECK(ti_check_general(MpsX(fx::w_tensor(), fx::w_boundary())));

  MatrixSet wl = fx::wlike_tensor(2, 2, fx::rng());
  CMatrix x = CMatrix::Zero(4, 4);
  x.block(2, 0, 2, 2) = fx::diag({1, 2});
  MpsX bad(wl, x);
  CHECK(!ti_check_general(bad));
  CHECK(!shift_invariant(bad, 4));
}

TEST_CASE("property: commutator test agrees with cyclic-shift invariance") {
  for (int trial = 0; trial < 12; ++trial) {
    const bool nonsemi = trial % 2;
    MatrixSet base = nonsemi ? fx::nonsemisimple_tensor(2, 1, fx::rng()) : fx::wlike_tensor(2, 2, fx::rng());
    MatrixSet s = fx::conjugate(base, fx::random_invertible(base.D));
    CMatrix x;
    switch (trial % 3) {
      case 0: x = fx::random_matrix(s.D, s.D); break;
      case 1: x = ti_boundary(s, {1.0, cplx(0.5, 1), 2.0, -1.0, 0.75}); break;
      default: x = CMatrix::Identity(s.D, s.D); break;
    }
    MpsX m(s, x);
    CHECK(ti_check_general(m) == shift_invariant(m, 6));
  }
}

TEST_CASE("boundary simplification of the W family") {
  MatrixSet s = fx::w_tensor();
  StructuredBasis sb = build_structured_basis(analyze_structure(s), BasisMode::Algebra);
  GammaTensor g = gamma_tensor(sb);
  CMatrix x(2, 2);
  x << 0.5, 7.0, 3.0, 1.5;  // X11 + X22 = 2, X21 = 3, X12 unconstrained
  TiReport r = simplify_boundary(MpsX(s, x), sb, g);
  CHECK(r.is_ti);
  CHECK(std::abs(r.beta[0] - cplx(2)) < 1e-12);
  CHECK(std::abs(r.beta[1] - cplx(3)) < 1e-12);
  CMatrix y(2, 2);
  y << 2, 0, 3, 0;
  CHECK((r.y - y).norm() < 1e-12);
  CHECK(state_diff(MpsX(s, x), MpsX(s, r.x_tilde), 8) < 1e-12);
}

TEST_CASE("W-like family: scalar and non-scalar boundaries") {
  MatrixSet s = fx::conjugate(fx::wlike_tensor(2, 2, fx::rng()), fx::random_invertible(4));
  StructuredBasis sb = build_structured_basis(analyze_structure(s), BasisMode::Algebra);
  REQUIRE(sb.n_labels() == 2);
  GammaTensor g = gamma_tensor(sb);

  TiReport ok = simplify_boundary(MpsX(s, ti_boundary(s, {2.0, -1.0})), sb, g);
  CHECK(ok.is_ti);
  CHECK(std::abs(ok.y(0, 1)) + std::abs(ok.y(1, 1)) < 1e-12);
  CHECK(std::abs(ok.y(0, 0)) > 1e-6);
  CHECK(std::abs(ok.y(1, 0)) > 1e-6);

  // a non-scalar X21 in the structured frame violates condition (i)
  CMatrix xt = CMatrix::Zero(4, 4);
  xt.block(2, 0, 2, 2) = fx::diag({1, 2});
  MpsX bad(s, sb.Pinv * xt * sb.P);
  TiReport r = simplify_boundary(bad, sb, g);
  CHECK(!r.is_ti);
  CHECK(r.residual_i[1] > 0.1);
  CHECK(!ti_check_general(bad));
}

TEST_CASE("three-block algebra forces the product label to vanish") {
  // letters [[a,b,e],[0,a,c],[0,0,a]] with scalar entries
  std::vector<CMatrix> mats;
  for (int x = 0; x < 3; ++x) {
    CMatrix r = fx::random_matrix(1, 4);
    CMatrix m = CMatrix::Zero(3, 3);
    m(0, 0) = m(1, 1) = m(2, 2) = r(0, 0);
    m(0, 1) = r(0, 1);
    m(1, 2) = r(0, 2);
    m(0, 2) = r(0, 3);
    mats.push_back(m);
  }
  MatrixSet s(mats);
  StructuredBasis sb = build_structured_basis(analyze_structure(s), BasisMode::Algebra);
  REQUIRE(sb.n_labels() == 4);
  GammaTensor g = gamma_tensor(sb);
  int corner = -1;
  for (int t = 0; t < 4; ++t)
    if (sb.labels[t].i0 == 0 && sb.labels[t].j0 == 2) corner = t;
  REQUIRE(corner >= 0);

  CMatrix xc = CMatrix::Zero(3, 3);
  xc(2, 0) = 1;
  TiReport r = simplify_boundary(MpsX(s, sb.Pinv * xc * sb.P), sb, g);
  CHECK(!r.is_ti);
  CHECK(r.residual_ii > 0.1);
  CHECK(!ti_check_general(MpsX(s, sb.Pinv * xc * sb.P)));

  CMatrix xb = CMatrix::Zero(3, 3);
  xb(1, 0) = 5;
  xb(2, 1) = -2;
  xb(0, 0) = 1;
  MpsX okm(s, sb.Pinv * xb * sb.P);
  TiReport ok = simplify_boundary(okm, sb, g);
  CHECK(ok.is_ti);
  CHECK(std::abs(ok.beta[corner]) == 0);
  CHECK(ti_check_general(okm));
  CHECK(state_diff(okm, MpsX(s, ok.x_tilde), 8) < 1e-9);
}

TEST_CASE("identity boundary on block-diagonal tensors") {
  MatrixSet a = fx::random_set(2, 2);
  MatrixSet s = block_diagonal({a, a});
  StructuredBasis sb = build_structured_basis(analyze_structure(s), BasisMode::Algebra);
  REQUIRE(sb.n_labels() == 1);
  TiReport r = simplify_boundary(MpsX(s, CMatrix::Identity(4, 4)), sb, gamma_tensor(sb));
  CHECK(r.is_ti);
  CHECK(std::abs(r.beta[0] - cplx(2)) < 1e-9);
}

TEST_CASE("property: simplified boundaries generate the same family") {
  for (int trial = 0; trial < 8; ++trial) {
    MatrixSet base = trial % 2 ? fx::nonsemisimple_tensor(2, 1 + trial % 3 / 2, fx::rng())
                               : fx::wlike_tensor(2, 2, fx::rng());
    MatrixSet s = fx::conjugate(base, fx::random_invertible(base.D));
    StructuredBasis sb = build_structured_basis(analyze_structure(s), BasisMode::Algebra);
    // TI boundary plus junk in blocks that never meet the tensor
    CMatrix junk = CMatrix::Zero(sb.D, sb.D);
    junk.block(0, sb.offsets.back(), sb.sizes[0], sb.sizes.back()) = fx::random_matrix(sb.sizes[0], sb.sizes.back());
    CMatrix x = ti_boundary(s, {1.0, cplx(0, 1), 0.5, 2.0, -1.0}, junk);
    TiReport r = simplify_boundary(MpsX(s, x), sb, gamma_tensor(sb));
    REQUIRE(r.is_ti);
    CHECK(state_diff(MpsX(s, x), MpsX(s, r.x_tilde), 8) < 1e-8);
  }
}

TEST_CASE("gCF of the W family") {
  CMatrix x(2, 2);
  x << 1, 0, 2, 1;
  GcfResult g = assemble_gcf(MpsX(fx::w_tensor(), x));
  CHECK(g.block_length == 1);
  CHECK(format_rls(g.backbone) == "b0*|0*> + b1*S1|0* f 0*>(|1>)");
  CHECK(format_rls(g.backbone_values) == "2*|0*> + 2*S1|0* f 0*>(|1>)");
  CHECK(g.gamma_invariant);
  CHECK(g.injectivity.length == 1);
  REQUIRE(g.verify_residuals.size() == 6);
  for (double v : g.verify_residuals) CHECK(v < 1e-10);
  CHECK(std::abs(g.beta_values().at("b1") - cplx(2)) < 1e-12);

  GcfResult pure = assemble_gcf(MpsX(fx::w_tensor(), fx::w_boundary()));
  CHECK(format_rls(pure.backbone) == "b1*S1|0* f 0*>(|1>)");
}

TEST_CASE("gCF of the four-block nonsemisimple family") {
  MatrixSet s = fx::nonsemisimple_tensor(2, 1, fx::rng());
  GcfResult g = assemble_gcf(MpsX(s, ti_boundary(s, {1.0, 2.0, 0.0, 3.0, 4.0})));
  CHECK(format_rls(g.backbone) == "b0*|0*> + b1*|1*> + S1|0* f 0*>(b3*|3> + b4*|4>) + b4*S2|0* f 0* f 0*>(|3 3>)");
  CHECK(g.gamma_invariant);
  for (double v : g.verify_residuals) CHECK(v < 1e-8);
}

TEST_CASE("gCF of stable periodic-boundary families") {
  MatrixSet s = block_diagonal({fx::random_set(2, 2), fx::random_set(2, 2)});
  GcfResult g = assemble_gcf(MpsX(s, CMatrix::Identity(4, 4)));
  CHECK(format_rls(g.backbone) == "b0*|0*> + b1*|1*>");
  CHECK(format_rls(g.backbone_values) == "1*|0*> + 1*|1*>");
  CHECK(g.backbone.sigma_f.empty());
  CHECK(g.backbone.alphabet == g.backbone.sigma_inf);
  for (double v : g.verify_residuals) CHECK(v < 1e-8);

  // antiferromagnetic: period 2, blocked before assembly
  MatrixSet af({fx::unit(2, 0, 1), fx::unit(2, 1, 0)});
  GcfResult p = assemble_gcf(MpsX(af, CMatrix::Identity(2, 2)));
  CHECK(p.block_length == 2);
  CHECK(p.backbone.sigma_f.empty());
  for (double v : p.verify_residuals) CHECK(v < 1e-10);
}

TEST_CASE("gCF errors") {
  CHECK(kind_of([] { assemble_gcf(MpsX(fx::jordan_tensor(), CMatrix::Identity(fx::jordan_tensor().D, fx::jordan_tensor().D))); }) ==
        ErrorKind::NotStable);
  CHECK(kind_of([] { assemble_gcf(MpsX(fx::irrational_phase_tensor(), CMatrix::Identity(2, 2))); }) ==
        ErrorKind::NotStable);
  MatrixSet wl = fx::wlike_tensor(2, 2, fx::rng());
  CMatrix x = CMatrix::Zero(4, 4);
  x.block(2, 0, 2, 2) = fx::diag({1, 2});
  CHECK(kind_of([&] { assemble_gcf(MpsX(wl, x)); }) == ErrorKind::NotTI);
}

TEST_CASE("property: gCF reproduces the family in random gauges") {
  for (int trial = 0; trial < 6; ++trial) {
    MatrixSet base = trial % 2 ? fx::nonsemisimple_tensor(2, 1, fx::rng()) : fx::wlike_tensor(2, 2, fx::rng());
    MatrixSet s = fx::conjugate(base, fx::random_invertible(base.D));
    GcfResult g = assemble_gcf(MpsX(s, ti_boundary(s, {1.0, -0.5, 2.0, 0.3, 1.7})));
    CHECK(g.gamma_invariant);
    REQUIRE(!g.verify_residuals.empty());
    for (double v : g.verify_residuals) CHECK(v < 1e-8);
    CHECK(gcf_diff(MpsX(s, ti_boundary(s, {1.0, -0.5, 2.0, 0.3, 1.7})), g) < 1e-8);
  }
}

TEST_CASE("round trip: RLS families through the gCF") {
  for (const std::string t : {"|0* 1 0*>", "2*|0*> + |1*>", "|0* 1 0*> + 3*|0*>", "|0* 1 0* 1 0*> + |0* 2 0*>",
                              "S2|0* f 0* f 0*>(|1 2> + |2 1>) + |0* 1 0* 1 0*>"}) {
    AlgebraicRls r = parse_rls(t);
    MpsX m = rls_to_mpsx(r);
    GcfResult g = assemble_gcf(m);
    CHECK(gcf_diff(m, g) < 1e-8);
    CHECK(g.gamma_invariant);
  }
}

TEST_CASE("domain-wall RLS is not translation invariant") {
  // 1 4 0 0 2 is a rotation of 0 2 1 4 0 but has no decomposition 0* {2,3} 1* 4 0*
  MpsX m = rls_to_mpsx(parse_rls("S2 |0* f 1* f 0*> (2*|2 4> + 3*|3 4>)"));
  CHECK(!ti_check_general(m));
  CHECK(!shift_invariant(m, 5));
  CHECK(kind_of([&] { assemble_gcf(m); }) == ErrorKind::NotTI);
}
