#include "mpsx/stability.hpp"

#include <cmath>
#include <string>

namespace mpsx {

const char* verdict_name(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::Stable: return "stable";
    case StabilityVerdict::NotStable: return "not-stable";
    case StabilityVerdict::Undecided: return "undecided";
  }
  return "undecided";
}

std::string stabilization_bound(int p, long q, int b, int D) {
  if (q == kInfinite) return "inf";
  const long double v = static_cast<long double>(p) * q * 45.0L * b * b * std::pow(static_cast<long double>(D), 3) *
                        std::pow(2.0L, static_cast<long double>(b) * b) * b * std::pow(2.0L, b);
  if (v < 9.0e18L) return std::to_string(static_cast<long long>(v));
  return std::to_string(p) + "*" + std::to_string(q) + "*45*" + std::to_string(b) + "^2*" + std::to_string(D) +
         "^3*2^(" + std::to_string(b) + "^2)*" + std::to_string(b) + "*2^" + std::to_string(b);
}

StabilityReport check_stability(const MatrixSet& s, const Options& opt) {
  StabilityReport r;
  r.bound_lbi = static_cast<long>(s.D) * s.D;
  r.bound_ralg = r.bound_lbi;
  StructureAnalysis sa = analyze_structure(s, opt);
  const auto& part = sa.tri.part;
  r.p = sa.p;
  r.q = part.q;
  r.b = part.b();
  r.bound_stab = stabilization_bound(r.p, r.q, r.b, s.D);
  if (part.q == kInfinite) {
    r.verdict = StabilityVerdict::NotStable;
    r.witness = "q";
    for (cplx m : part.mu) {
      bool finite = std::abs(std::abs(m) - 1.0) <= 1e-8;
      if (finite) {
        finite = false;
        for (int n = 1; n <= opt.q_max && !finite; ++n) finite = std::abs(std::pow(m, n) - cplx(1)) < 1e-8;
      }
      if (!finite) {
        r.witness_mu = m;
        break;
      }
    }
    return r;
  }

  // letters of the p*q-blocked tensor, as a basis of its length-1 span
  MatSpan first = span_fixed_length(sa.effective, static_cast<int>(part.q), opt.tol);
  r.identity0_cap = std::min<long>(8L << std::min(r.b, 20), opt.cap_len);
  if (first.dim() == 0) {
    r.verdict = StabilityVerdict::Stable;
    r.identity0_length = r.stable_multiple = 1;
    r.stable_length = static_cast<long>(r.p) * r.q;
    r.probed_dims = {0};
    return r;
  }
  MatrixSet blocked(first.elements());
  StructureAnalysis sb = analyze_structure(blocked, opt);
  StructuredBasis basis = build_structured_basis(sb, BasisMode::Algebra, 1, opt);
  const CMatrix id0 = identity0(basis);
  const MatrixSet& frame = sb.effective;

  for (long l = 1; l <= r.identity0_cap; ++l)
    if (contains_identity0(frame, static_cast<int>(l), id0, opt.tol)) {
      r.identity0_length = l;
      break;
    }
  if (r.identity0_length == kInfinite) {
    r.verdict = StabilityVerdict::NotStable;
    r.witness = "identity0-absent";
    return r;
  }

  const int l0 = static_cast<int>(r.identity0_length);
  MatSpan base = span_fixed_length(frame, l0, opt.tol);
  AlgebraRep alg = generate_algebra(MatrixSet(base.elements()), opt.tol);
  r.alg_dim = alg.dim();
  r.r_alg = alg.r_alg;
  // dims of A^(s l0) for s = 1..r_alg+2, extended until three consecutive values equal dim Alg
  const int s_max = std::max(r.r_alg + 2, 3);
  int run = 0;
  for (int sm = 1; sm <= s_max + 2; ++sm) {
    if (static_cast<long>(sm) * l0 > opt.cap_len * 4L) break;
    const int dim = span_fixed_length(frame, sm * l0, opt.tol).dim();
    r.probed_dims.push_back(dim);
    if (dim == r.alg_dim) {
      if (run == 0) r.stable_multiple = sm;
      ++run;
    } else {
      run = 0;
      r.stable_multiple = kInfinite;
    }
    if (sm >= s_max && run >= 3) break;
  }
  if (run >= 3) {
    r.verdict = StabilityVerdict::Stable;
    r.stable_length = r.stable_multiple * l0 * r.p * r.q;
  } else {
    r.verdict = StabilityVerdict::Undecided;
    r.stable_multiple = kInfinite;
  }
  return r;
}

}  // namespace mpsx
