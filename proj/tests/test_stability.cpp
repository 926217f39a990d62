#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fixtures.hpp"
#include "mpsx/stability.hpp"

using namespace mpsx;

TEST_CASE("W tensor is stable from length 1") {
  StabilityReport r = check_stability(fx::w_tensor());
  CHECK(r.stable());
  CHECK(r.q == 1);
  CHECK(r.identity0_length == 1);
  CHECK(r.stable_multiple == 1);
  CHECK(r.stable_length == 1);
  CHECK(r.alg_dim == 2);
  for (int dim : r.probed_dims) CHECK(dim == 2);
}

TEST_CASE("Jordan block is not stable: padded identity never appears") {
  StabilityReport r = check_stability(fx::jordan_tensor());
  CHECK(r.verdict == StabilityVerdict::NotStable);
  CHECK(r.witness == "identity0-absent");
  CHECK(r.q == 1);
  // oracle: A^(l) is spanned by [[1,l],[0,1]], never the identity
  for (int l = 1; l <= r.identity0_cap; ++l) {
    CMatrix j = CMatrix::Identity(2, 2);
    j(0, 1) = l;
    CHECK(!contains_identity0(fx::jordan_tensor(), l, CMatrix::Identity(2, 2)));
    CHECK(span_fixed_length(fx::jordan_tensor(), l).dim() == 1);
    CHECK(contains(span_fixed_length(fx::jordan_tensor(), l).space, vec(j)));
  }
}

TEST_CASE("irrational relative phase is not stable: q is infinite") {
  StabilityReport r = check_stability(fx::irrational_phase_tensor());
  CHECK(r.verdict == StabilityVerdict::NotStable);
  CHECK(r.witness == "q");
  CHECK(r.q == kInfinite);
  CHECK(std::abs(r.witness_mu - std::exp(cplx(0, std::sqrt(2.0) * M_PI))) < 1e-9);
  CHECK(r.bound_stab == "inf");
}

TEST_CASE("rational phases and periods are stabilized by blocking") {
  MatrixSet ph({fx::diag({1, cplx(0, 1)})});
  StabilityReport r = check_stability(ph);
  CHECK(r.stable());
  CHECK(r.q == 4);
  CHECK(r.stable_length % 4 == 0);

  MatrixSet anti({fx::unit(2, 0, 1), fx::unit(2, 1, 0)});
  StabilityReport a = check_stability(anti);
  CHECK(a.stable());
  CHECK(a.p == 2);
}

TEST_CASE("property: stable verdict means probed spans equal the algebra") {
  std::vector<MatrixSet> sets = {fx::w_tensor(), fx::ghz_tensor(), fx::random_set(2, 3),
                                 fx::nonsemisimple_tensor(2, 1, fx::rng()), fx::wlike_tensor(2, 2, fx::rng())};
  for (const auto& s : sets) {
    StabilityReport r = check_stability(s);
    REQUIRE(r.stable());
    int equal = 0;
    for (int dim : r.probed_dims) equal += dim == r.alg_dim;
    CHECK(equal >= 3);
    // oracle: dims of the fixed-length spans stop changing from the reported length on
    if (r.stable_length <= 4) {
      const int at = oracle::span_dim(fx::to_oracle(s), static_cast<int>(r.stable_length));
      for (int k = 1; k <= 2; ++k)
        CHECK(oracle::span_dim(fx::to_oracle(s), static_cast<int>(r.stable_length) + k) == at);
    }
    CHECK(r.stable_length <= r.bound_lbi * r.identity0_cap);
  }
}

TEST_CASE("property: verdicts are gauge invariant") {
  std::vector<MatrixSet> sets = {fx::w_tensor(), fx::jordan_tensor(), fx::irrational_phase_tensor(),
                                 fx::nonsemisimple_tensor(2, 1, fx::rng())};
  for (const auto& s : sets) {
    StabilityReport r0 = check_stability(s);
    for (int trial = 0; trial < 5; ++trial) {
      StabilityReport r = check_stability(fx::conjugate(s, fx::random_invertible(s.D)));
      CHECK(r.verdict == r0.verdict);
      CHECK(r.witness == r0.witness);
      CHECK(r.stable_length == r0.stable_length);
    }
  }
}

TEST_CASE("direct sums of two injective blocks are stable") {
  std::mt19937_64 g(1);
  for (int trial = 0; trial < 6; ++trial) {
    const MatrixSet a = fx::random_set(2, 2, g), b = fx::random_set(2, 2, g);
    std::vector<CMatrix> m;
    for (int x = 0; x < 2; ++x) {
      CMatrix y = CMatrix::Zero(4, 4);
      y.topLeftCorner(2, 2) = a[x];
      y.bottomRightCorner(2, 2) = b[x];
      m.push_back(y);
    }
    const StabilityReport r = check_stability(MatrixSet(m));
    CHECK(r.verdict == StabilityVerdict::Stable);
    CHECK(r.alg_dim == 8);
  }
}

TEST_CASE("stabilization bound is reported symbolically when it overflows") {
  CHECK(stabilization_bound(1, 1, 1, 1) == std::to_string(45 * 2 * 2));
  CHECK(stabilization_bound(1, 1, 6, 8).find("2^(6^2)") != std::string::npos);
}
