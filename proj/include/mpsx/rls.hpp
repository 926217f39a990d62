/** @file rls.hpp
 * Algebraic and span regular-language states: the expression grammar,
 * MPS-X constructions, backbone extraction and Gamma-blocking checks.
 */
#ifndef MPSX_RLS_HPP
#define MPSX_RLS_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mpsx/canonical_basis.hpp"

namespace mpsx {

struct MpsX;

/// Empty string stands for the vanishing class (written `_*`).
using Symbol = std::string;
using Word = std::vector<Symbol>;

/// Symbolic weight: linear combination of named parameters plus a constant.
struct Weight {
  cplx constant = 0;
  std::map<std::string, cplx> params;

  bool is_zero(double tol = 1e-12) const;
  cplx value(const std::map<std::string, cplx>& bind = {}) const;
  Weight& operator+=(const Weight& o);
};
Weight operator*(cplx c, const Weight& w);

struct AlgebraicRls {
  std::vector<Symbol> sigma_inf;
  std::vector<Symbol> sigma_f;
  std::map<Symbol, std::pair<Symbol, Symbol>> sector;  // f symbol -> (left class, right class)
  std::vector<Symbol> alphabet;                        // physical order; defaults to natural order of all symbols
  std::map<Word, std::map<Word, Weight>> defining;     // O -> string -> weight

  int M() const;
  /// Numeric copy with parameters bound (unbound names default to 1).
  AlgebraicRls bound(const std::map<std::string, cplx>& bind) const;
  void drop_zero_weights(double tol = 1e-12);
  int index_of(const Symbol& s) const;
};

/// One term alpha * prod_i lambda_i^{n_i} of an amplitude law.
struct LawTerm {
  cplx alpha = 1;
  std::vector<cplx> lambda;  // one per run, m+1 entries
};

struct SpanRls {
  std::vector<Symbol> sigma_inf;
  std::vector<Symbol> alphabet;
  std::map<Word, std::map<Word, std::vector<LawTerm>>> defining;  // O -> string -> law

  int M() const;
  int K() const;
  int n_inf_letters() const;  // letters used as runs
  int index_of(const Symbol& s) const;
};

/// Symbols sorted with numbers first (by value), then the rest lexicographically.
std::vector<Symbol> natural_order(std::vector<Symbol> s);

AlgebraicRls parse_rls(const std::string& text);
/// Prints in the grammar; symbolic weights split into one ket per parameter.
std::string format_rls(const AlgebraicRls& r);

/// Block-diagonal construction; blocks of zero-weight strings are omitted.
MpsX rls_to_mpsx(const AlgebraicRls& r);
MpsX span_rls_to_mpsx(const SpanRls& r);

long algebraic_bond_bound(const AlgebraicRls& r);
long span_bond_bound(const SpanRls& r);

/// Backbone Tr[Y A_low^w] grouped by class strings; letter e is named by its index.
/// Diagonal letters (0/1 diagonals) define the classes, the others must be strictly upper.
AlgebraicRls extract_backbone(const std::vector<std::vector<Weight>>& y, const MatrixSet& a_low, double tol = 1e-9);
AlgebraicRls extract_backbone(const CMatrix& y, const MatrixSet& a_low, double tol = 1e-9);

/// d^alpha x d matrix whose column k lists the fine amplitudes of coarse symbol k.
CMatrix gamma_power(const GammaTensor& g, int alpha);

/// psi_{alpha beta} == Gamma_alpha^{(x) beta} psi_beta on the state vectors of r.
bool gamma_block_check(const AlgebraicRls& r, const GammaTensor& g, int alpha, int beta, long amp_cap = 1L << 20,
                       double tol = 1e-9);

/// Reads {"symbols":[...], "entries":[{"out":s,"in":[s,s],"w":[re,im]}]}, with symbols ordered as `alphabet`.
GammaTensor gamma_from_json(const std::string& text, const std::vector<Symbol>& alphabet);
std::string gamma_to_json(const GammaTensor& g, const std::vector<Symbol>& symbols);

}  // namespace mpsx

#endif
