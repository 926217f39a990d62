#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fixtures.hpp"
#include "mpsx/canonical_basis.hpp"

using namespace mpsx;

namespace {

int count_diagonal(const StructuredBasis& sb) {
  int n = 0;
  for (const auto& l : sb.labels) n += l.diagonal;
  return n;
}

/// Structural invariants every structured basis must satisfy.
void check_invariants(const MatrixSet& s, const StructureAnalysis& a, const StructuredBasis& sb) {
  CHECK((sb.P * sb.Pinv - CMatrix::Identity(sb.D, sb.D)).norm() < 1e-8);
  for (const auto& e : sb.elements) {
    for (int i = 0; i < sb.b(); ++i)
      for (int j = 0; j < i; ++j) CHECK(sb.block(e, i, j).norm() < 1e-8 * (1 + e.norm()));
    CHECK((sb.reconstruct(sb.decompose(e)) - e).norm() < 1e-7 * (1 + e.norm()));
  }
  // diagonal labels come first and their names are their indices
  for (int e = 0; e < sb.n_labels(); ++e) {
    CHECK(sb.labels[e].name == std::to_string(e));
    CHECK(sb.labels[e].diagonal == (e < sb.n_inf));
  }
  GammaTensor g = gamma_tensor(sb);
  GammaChecks c = check_gamma(sb, g);
  CHECK(c.p1 < 1e-8);
  CHECK(c.p2 < 1e-8);
  CHECK(c.p3 < 1e-8);
  CHECK(c.assoc < 1e-8);
  if (a.p == 1) {
    MatrixCF cf = matrix_cf(s, sb);
    CHECK(cf.residual < 1e-8);
    CHECK(cf.a_low.d == sb.n_labels());
  }
}

}  // namespace

TEST_CASE("W tensor has one diagonal and one free label") {
  MatrixSet s = fx::w_tensor();
  StructureAnalysis a = analyze_structure(s);
  StructuredBasis sb = build_structured_basis(a, BasisMode::Algebra);
  REQUIRE(sb.n_labels() == 2);
  CHECK(sb.labels[0].diagonal);
  CHECK(!sb.labels[1].diagonal);
  CHECK(sb.labels[1].r1 == 0);
  CHECK(sb.labels[1].r2 == 0);
  CHECK(std::abs(sb.k[0][0][0] - cplx(1)) < 1e-12);
  CHECK(std::abs(sb.k[1][1][0] - cplx(1)) < 1e-12);
  CHECK(std::abs(sb.k[0][1][1] - cplx(1)) < 1e-12);
  GammaTensor g = gamma_tensor(sb);
  // [0][0]=[0], [0][1]=[1][0]=[1], [1][1]=0
  CHECK(std::abs(g(0, 0, 0) - cplx(1)) < 1e-12);
  CHECK(std::abs(g(0, 1, 1) - cplx(1)) < 1e-12);
  CHECK(std::abs(g(1, 0, 1) - cplx(1)) < 1e-12);
  CHECK(std::abs(g(1, 1, 0)) + std::abs(g(1, 1, 1)) < 1e-12);
  check_invariants(s, a, sb);
}

TEST_CASE("nonsemisimple scalar tensor: two classes and three free labels") {
  MatrixSet s = fx::nonsemisimple_tensor(2, 1, fx::rng());
  StructureAnalysis a = analyze_structure(s);
  StructuredBasis sb = build_structured_basis(a, BasisMode::Algebra);
  CHECK(sb.n_inf == 2);
  CHECK(count_diagonal(sb) == 2);
  CHECK(sb.n_labels() - count_diagonal(sb) == 3);
  CHECK(sb.n_coords() == oracle::union_dim(fx::to_oracle(s), 4));
  check_invariants(s, a, sb);

  // labels a=0, b=1, c=(0,1), d=(2,3), e=(0,3); every structure constant is 0 or 1
  REQUIRE(a.tri.part.cls == std::vector<int>{0, 1, 0, 0});
  GammaTensor g = gamma_tensor(sb);
  std::vector<std::array<int, 3>> ones = {{0, 0, 0}, {1, 1, 1}, {0, 2, 2}, {2, 1, 2}, {0, 3, 3},
                                          {3, 0, 3}, {0, 4, 4}, {4, 0, 4}, {3, 3, 4}};
  for (int p = 0; p < 5; ++p)
    for (int q = 0; q < 5; ++q)
      for (int r = 0; r < 5; ++r) {
        const bool one = std::find(ones.begin(), ones.end(), std::array<int, 3>{p, q, r}) != ones.end();
        CHECK(std::abs(g(p, q, r) - cplx(one ? 1 : 0)) < 1e-8);
      }
}

TEST_CASE("property: random gauges give the same label counts") {
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 1 + trial % 2;
    MatrixSet base = fx::nonsemisimple_tensor(2, n, fx::rng());
    MatrixSet s = fx::conjugate(base, fx::random_invertible(4 * n));
    StructureAnalysis a = analyze_structure(s);
    StructuredBasis sb = build_structured_basis(a, BasisMode::Algebra);
    CHECK(sb.n_inf == 2);
    CHECK(sb.n_labels() - count_diagonal(sb) == 3);
    CHECK(sb.n_coords() == oracle::union_dim(fx::to_oracle(s), 4));
    check_invariants(s, a, sb);
  }
}

TEST_CASE("unipotent gauge is undone on dependent blocks") {
  MatrixSet base = fx::nonsemisimple_tensor(2, 1, fx::rng());
  CMatrix u = CMatrix::Identity(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) u(i, j) = fx::random_matrix(1, 1)(0, 0);
  MatrixSet s = fx::conjugate(base, u);
  StructureAnalysis a = analyze_structure(s);
  StructuredBasis sb = build_structured_basis(a, BasisMode::Algebra);
  REQUIRE(a.tri.part.cls == std::vector<int>{0, 1, 0, 0});
  for (const auto& e : sb.elements) {
    CHECK(std::abs(e(1, 2)) < 1e-8);
    CHECK(std::abs(e(1, 3)) < 1e-8);
    CHECK(std::abs(e(0, 2) - e(2, 3)) < 1e-8);
  }
  CHECK(!sb.labels[4].diagonal);
  CHECK(sb.labels[4].i0 == 0);
  CHECK(sb.labels[4].j0 == 3);
  check_invariants(s, a, sb);
}

TEST_CASE("isolatability lengths of a nilpotent chain") {
  CMatrix n = fx::unit(3, 0, 1) + fx::unit(3, 1, 2);
  MatrixSet s({CMatrix::Identity(3, 3), n});
  StructureAnalysis a = analyze_structure(s);
  StructuredBasis sb = build_structured_basis(a, BasisMode::Algebra);
  CHECK(sb.n_labels() == 3);
  CHECK(sb.m.at({0, 1}) == 1);
  CHECK(sb.m.at({1, 2}) == kInfinite);
  CHECK(sb.m.at({0, 2}) == 2);
  check_invariants(s, a, sb);
}

TEST_CASE("span mode on the W tensor") {
  MatrixSet s = fx::w_tensor();
  StructureAnalysis a = analyze_structure(s);
  for (int l = 1; l <= 3; ++l) {
    StructuredBasis sb = build_structured_basis(a, BasisMode::Span, l);
    CHECK(sb.n_coords() == oracle::span_dim(fx::to_oracle(s), l));
    CHECK(sb.n_labels() == 2);
  }
}

TEST_CASE("identity0 is zero on a vanishing block") {
  MatrixSet s({fx::unit(2, 0, 0), fx::unit(2, 0, 1)});
  StructureAnalysis a = analyze_structure(s);
  StructuredBasis sb = build_structured_basis(a, BasisMode::Algebra);
  CMatrix id = identity0(sb);
  CHECK((id * id - id).norm() < 1e-9);
  CHECK(std::abs(id.trace() - cplx(1)) < 1e-9);
}

TEST_CASE("block-injectivity lengths") {
  {
    std::vector<CMatrix> m;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m.push_back(fx::unit(2, i, j));
    MatrixSet s(m);
    StructureAnalysis a = analyze_structure(s);
    MatrixCF cf = matrix_cf(s, build_structured_basis(a, BasisMode::Algebra));
    BlockInjectivity bi = block_injectivity_length(cf, 4);
    CHECK(bi.length == 1);
    CHECK(bi.certificate_residual < 1e-9);
  }
  {
    MatrixSet s = fx::w_tensor();
    StructureAnalysis a = analyze_structure(s);
    MatrixCF cf = matrix_cf(s, build_structured_basis(a, BasisMode::Algebra));
    BlockInjectivity bi = block_injectivity_length(cf, 4);
    CHECK(bi.length == 1);
    CHECK(bi.certificate_residual < 1e-9);
  }
  {
    // [[B,B],[0,B]]: the free content is always a multiple of the diagonal one
    std::vector<CMatrix> m;
    for (int x = 0; x < 2; ++x) {
      CMatrix b = fx::random_matrix(2, 2);
      CMatrix l = CMatrix::Zero(4, 4);
      l.block(0, 0, 2, 2) = b;
      l.block(0, 2, 2, 2) = b;
      l.block(2, 2, 2, 2) = b;
      m.push_back(l);
    }
    MatrixSet s(m);
    StructureAnalysis a = analyze_structure(s);
    MatrixCF cf = matrix_cf(s, build_structured_basis(a, BasisMode::Algebra));
    CHECK(block_injectivity_length(cf, 4).length == kInfinite);
    CHECK_THROWS_AS(block_injectivity_length(cf, 20, 64), Error);
  }
}
