/** @file rls.cpp
 * Expression grammar, RLS to MPS-X constructions, backbone extraction and Gamma-blocking.
 */
#include "mpsx/rls.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mpsx/mpsx_states.hpp"

namespace mpsx {

// ---------------------------------------------------------------- weights

bool Weight::is_zero(double tol) const {
  if (std::abs(constant) > tol) return false;
  for (const auto& [k, v] : params)
    if (std::abs(v) > tol) return false;
  return true;
}

cplx Weight::value(const std::map<std::string, cplx>& bind) const {
  cplx v = constant;
  for (const auto& [k, c] : params) {
    auto it = bind.find(k);
    v += c * (it == bind.end() ? cplx(1) : it->second);
  }
  return v;
}

Weight& Weight::operator+=(const Weight& o) {
  constant += o.constant;
  for (const auto& [k, v] : o.params) params[k] += v;
  return *this;
}

Weight operator*(cplx c, const Weight& w) {
  Weight r;
  r.constant = c * w.constant;
  for (const auto& [k, v] : w.params) r.params[k] = c * v;
  return r;
}

namespace {

Weight constant_weight(cplx c) {
  Weight w;
  w.constant = c;
  return w;
}

bool is_number(const Symbol& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

std::vector<Symbol> natural_order(std::vector<Symbol> s) {
  std::sort(s.begin(), s.end(), [](const Symbol& a, const Symbol& b) {
    const bool na = is_number(a), nb = is_number(b);
    if (na != nb) return na;
    if (na && a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

// ---------------------------------------------------------------- containers

int AlgebraicRls::M() const {
  int m = 0;
  for (const auto& [o, xs] : defining) m = std::max(m, static_cast<int>(o.size()) - 1);
  return m;
}

AlgebraicRls AlgebraicRls::bound(const std::map<std::string, cplx>& bind) const {
  AlgebraicRls r = *this;
  for (auto& [o, xs] : r.defining)
    for (auto& [x, w] : xs) w = constant_weight(w.value(bind));
  return r;
}

void AlgebraicRls::drop_zero_weights(double tol) {
  for (auto it = defining.begin(); it != defining.end();) {
    auto& xs = it->second;
    for (auto jt = xs.begin(); jt != xs.end();) jt = jt->second.is_zero(tol) ? xs.erase(jt) : std::next(jt);
    it = xs.empty() ? defining.erase(it) : std::next(it);
  }
}

int AlgebraicRls::index_of(const Symbol& s) const {
  auto it = std::find(alphabet.begin(), alphabet.end(), s);
  if (it == alphabet.end()) throw Error(ErrorKind::InvalidInput, "symbol '" + s + "' is not in the alphabet");
  return static_cast<int>(it - alphabet.begin());
}

int SpanRls::M() const {
  int m = 0;
  for (const auto& [o, xs] : defining) m = std::max(m, static_cast<int>(o.size()) - 1);
  return m;
}

int SpanRls::K() const {
  int k = 1;
  for (const auto& [o, xs] : defining)
    for (const auto& [x, law] : xs) k = std::max(k, static_cast<int>(law.size()));
  return k;
}

int SpanRls::n_inf_letters() const { return static_cast<int>(sigma_inf.size()); }

int SpanRls::index_of(const Symbol& s) const {
  auto it = std::find(alphabet.begin(), alphabet.end(), s);
  if (it == alphabet.end()) throw Error(ErrorKind::InvalidInput, "symbol '" + s + "' is not in the alphabet");
  return static_cast<int>(it - alphabet.begin());
}

// ---------------------------------------------------------------- parser

namespace {

class Parser {
 public:
  explicit Parser(const std::string& t) : text_(t) {}

  AlgebraicRls run() {
    skip();
    if (at_end()) fail("empty expression");
    term();
    for (skip(); !at_end(); skip()) {
      expect('+');
      term();
    }
    for (const auto& s : r_.sigma_f)
      if (std::find(r_.sigma_inf.begin(), r_.sigma_inf.end(), s) != r_.sigma_inf.end())
        throw Error(ErrorKind::SectorConflict, "symbol '" + s + "' is used both as a run and as a free letter");
    std::vector<Symbol> all = r_.sigma_inf;
    all.insert(all.end(), r_.sigma_f.begin(), r_.sigma_f.end());
    r_.alphabet = natural_order(all);
    return r_;
  }

 private:
  struct Slot {
    bool free = true;
    Symbol sym;
  };

  const std::string& text_;
  size_t pos_ = 0;
  AlgebraicRls r_;

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::SyntaxError, msg + " at position " + std::to_string(pos_));
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void skip() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  void expect(char c) {
    skip();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  static bool sym_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '{' || c == '}' || c == ',' || c == '.';
  }

  bool real(double& v) {
    const char* begin = text_.c_str() + pos_;
    if (!(std::isdigit(static_cast<unsigned char>(*begin)) || *begin == '-' || *begin == '+' || *begin == '.'))
      return false;
    char* end = nullptr;
    v = std::strtod(begin, &end);
    if (end == begin) return false;
    pos_ += static_cast<size_t>(end - begin);
    return true;
  }

  /// number with optional 'i', or a bare 'i'
  bool number(cplx& z) {
    const size_t save = pos_;
    double v = 1;
    const bool had = real(v);
    if (peek() == 'i' && !(pos_ + 1 < text_.size() && sym_char(text_[pos_ + 1]))) {
      ++pos_;
      z = cplx(0, v);
      return true;
    }
    if (!had) {
      pos_ = save;
      return false;
    }
    z = v;
    return true;
  }

  /// '(' a [+-] b 'i' ')' or a number or an identifier
  bool factor(Weight& w) {
    skip();
    const size_t save = pos_;
    if (peek() == '(') {
      ++pos_;
      skip();
      cplx a, b = 0;
      if (!number(a)) {
        pos_ = save;
        return false;
      }
      skip();
      if (peek() == '+' || peek() == '-') {
        const double sign = peek() == '-' ? -1 : 1;
        ++pos_;
        skip();
        if (!number(b) || b.real() != 0) {
          pos_ = save;
          return false;
        }
        b *= sign;
      }
      skip();
      if (peek() != ')') {
        pos_ = save;
        return false;
      }
      ++pos_;
      w = constant_weight(a + b);
      return true;
    }
    cplx z;
    if (number(z)) {
      w = constant_weight(z);
      return true;
    }
    if (std::isalpha(static_cast<unsigned char>(peek()))) {
      size_t e = pos_;
      while (e < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[e])) || text_[e] == '_')) ++e;
      Weight p;
      p.params[text_.substr(pos_, e - pos_)] = 1;
      pos_ = e;
      w = p;
      return true;
    }
    return false;
  }

  /// (factor '*')*; a factor not followed by '*' is left unconsumed
  Weight weight() {
    Weight total = constant_weight(1);
    bool symbolic = false;
    for (;;) {
      const size_t save = pos_;
      Weight f;
      if (!factor(f)) {
        pos_ = save;
        break;
      }
      skip();
      if (peek() != '*') {
        pos_ = save;
        break;
      }
      ++pos_;
      if (!f.params.empty()) {
        if (symbolic) fail("weights must be linear in the parameters");
        symbolic = true;
        total = total.constant * f;
      } else {
        total = f.constant * total;
      }
    }
    return total;
  }

  std::vector<std::pair<bool, Symbol>> ket_tokens() {
    expect('|');
    std::vector<std::pair<bool, Symbol>> toks;  // (is_run, symbol); free slots are (false, "")
    for (;;) {
      skip();
      if (peek() == '>') {
        ++pos_;
        break;
      }
      if (at_end()) fail("unterminated ket");
      size_t e = pos_;
      while (e < text_.size() && sym_char(text_[e])) ++e;
      if (e == pos_) fail("expected a symbol");
      Symbol s = text_.substr(pos_, e - pos_);
      pos_ = e;
      const bool run = peek() == '*';
      if (run) ++pos_;
      if (s == "_") {
        if (!run) fail("'_' must be followed by '*'");
        toks.push_back({true, ""});
      } else if (s == "f" && !run) {
        toks.push_back({false, ""});
      } else {
        toks.push_back({run, s});
      }
    }
    if (toks.empty()) fail("empty ket");
    return toks;
  }

  Word plain_ket() {
    expect('|');
    Word w;
    for (;;) {
      skip();
      if (peek() == '>') {
        ++pos_;
        break;
      }
      size_t e = pos_;
      while (e < text_.size() && sym_char(text_[e])) ++e;
      if (e == pos_) fail("expected a symbol");
      w.push_back(text_.substr(pos_, e - pos_));
      pos_ = e;
    }
    if (w.empty()) fail("empty ket");
    return w;
  }

  void add_run(const Symbol& s) {
    if (!s.empty() && std::find(r_.sigma_inf.begin(), r_.sigma_inf.end(), s) == r_.sigma_inf.end())
      r_.sigma_inf.push_back(s);
  }

  void add_letter(const Symbol& s, const Symbol& left, const Symbol& right) {
    auto it = r_.sector.find(s);
    if (it == r_.sector.end()) {
      r_.sector[s] = {left, right};
      r_.sigma_f.push_back(s);
    } else if (it->second != std::make_pair(left, right)) {
      throw Error(ErrorKind::SectorConflict, "free letter '" + s + "' appears in two sectors");
    }
  }

  void term() {
    skip();
    const Weight w = weight();
    skip();
    int declared = -1;
    if (peek() == 'S') {
      ++pos_;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        size_t e = pos_;
        while (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) ++e;
        declared = std::stoi(text_.substr(pos_, e - pos_));
        pos_ = e;
      }
    }
    const auto toks = ket_tokens();

    // normalize to run (slot run)*, inserting empty runs between adjacent slots
    Word runs;
    std::vector<Slot> slots;
    bool expect_run = true;
    for (const auto& [is_run, s] : toks) {
      if (is_run) {
        if (!expect_run) fail("two runs must be separated by a letter");
        runs.push_back(s);
        expect_run = false;
      } else {
        if (expect_run) runs.push_back("");
        slots.push_back({s.empty(), s});
        expect_run = true;
      }
    }
    if (expect_run) runs.push_back("");
    const int m = static_cast<int>(slots.size());
    if (declared >= 0 && declared != m) fail("S" + std::to_string(declared) + " does not match the letter count");
    int n_free = 0;
    for (const auto& s : slots) n_free += s.free;

    std::vector<std::pair<Weight, Word>> kets;
    skip();
    if (peek() == '(') {
      ++pos_;
      for (;;) {
        skip();
        const Weight kw = weight();
        const Word kw_str = plain_ket();
        kets.push_back({kw, kw_str});
        skip();
        if (peek() == '+') {
          ++pos_;
          continue;
        }
        expect(')');
        break;
      }
    } else {
      if (n_free > 0) fail("free letters need a ket sum");
      kets.push_back({constant_weight(1), {}});
    }

    for (const auto& r : runs) add_run(r);
    if (m == 0 && runs[0].empty()) fail("a term needs a run or a letter");
    for (const auto& [kw, kstr] : kets) {
      if (static_cast<int>(kstr.size()) != n_free) fail("ket length does not match the number of free letters");
      Word x;
      int next = 0;
      for (const auto& s : slots) x.push_back(s.free ? kstr[next++] : s.sym);
      for (int k = 0; k < m; ++k) add_letter(x[k], runs[k], runs[k + 1]);
      Weight total = w.constant * kw;
      if (!w.params.empty()) {
        if (!kw.params.empty()) fail("weights must be linear in the parameters");
        total = kw.constant * w;
      }
      r_.defining[runs][x] += total;
    }
  }
};

std::string format_number(cplx z) {
  auto g = [](double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
  };
  if (std::abs(z.imag()) <= 1e-14 * std::max(1.0, std::abs(z))) return g(z.real());
  if (std::abs(z.real()) <= 1e-14 * std::max(1.0, std::abs(z))) return g(z.imag()) + "i";
  return "(" + g(z.real()) + (z.imag() < 0 ? "-" : "+") + g(std::abs(z.imag())) + "i)";
}

/// One printable (prefix, weight) piece per parameter; the prefix is "" for weight 1.
std::vector<std::string> weight_pieces(const Weight& w) {
  std::vector<std::string> out;
  auto coef = [](cplx c) { return std::abs(c - cplx(1)) < 1e-14 ? std::string() : format_number(c) + "*"; };
  if (std::abs(w.constant) > 1e-14 || w.params.empty()) out.push_back(coef(w.constant));
  for (const auto& [k, c] : w.params)
    if (std::abs(c) > 1e-14) out.push_back(coef(c) + k + "*");
  return out;
}

std::string join(const Word& w) {
  std::string s;
  for (size_t k = 0; k < w.size(); ++k) s += (k ? " " : "") + w[k];
  return s;
}

}  // namespace

AlgebraicRls parse_rls(const std::string& text) { return Parser(text).run(); }

std::string format_rls(const AlgebraicRls& r) {
  std::vector<const std::pair<const Word, std::map<Word, Weight>>*> order;
  for (const auto& e : r.defining) order.push_back(&e);
  std::stable_sort(order.begin(), order.end(), [](auto a, auto b) { return a->first.size() < b->first.size(); });

  std::vector<std::string> terms;
  for (const auto* e : order) {
    const Word& o = e->first;
    const int m = static_cast<int>(o.size()) - 1;
    std::string pattern = "|";
    for (int k = 0; k <= m; ++k) {
      pattern += (o[k].empty() ? std::string("_") : o[k]) + "*";
      if (k < m) pattern += " f ";
    }
    pattern += ">";
    std::vector<std::pair<std::string, std::string>> kets;  // (weight prefix, ket)
    for (const auto& [x, w] : e->second)
      for (const auto& p : weight_pieces(w)) kets.push_back({p, "|" + join(x) + ">"});
    if (m == 0) {
      for (const auto& [p, k] : kets) terms.push_back((p.empty() ? std::string("1*") : p) + pattern);
    } else if (kets.size() == 1) {
      terms.push_back(kets[0].first + "S" + std::to_string(m) + pattern + "(" + kets[0].second + ")");
    } else {
      std::string sum;
      for (size_t k = 0; k < kets.size(); ++k) sum += (k ? " + " : "") + kets[k].first + kets[k].second;
      terms.push_back("S" + std::to_string(m) + pattern + "(" + sum + ")");
    }
  }
  if (terms.empty()) return "0";
  std::string s;
  for (size_t k = 0; k < terms.size(); ++k) s += (k ? " + " : "") + terms[k];
  return s;
}

// ---------------------------------------------------------------- constructions

namespace {

struct BlockBuilder {
  int d;
  std::vector<std::vector<std::tuple<int, int, cplx>>> entries;  // per letter
  std::vector<std::tuple<int, int, cplx>> x;
  int D = 0;

  explicit BlockBuilder(int letters) : d(letters), entries(letters) {}

  MpsX finish() const {
    const int n = std::max(D, 1);
    std::vector<CMatrix> mats(d, CMatrix::Zero(n, n));
    for (int y = 0; y < d; ++y)
      for (const auto& [i, j, v] : entries[y]) mats[y](i, j) += v;
    CMatrix xm = CMatrix::Zero(n, n);
    for (const auto& [i, j, v] : x) xm(i, j) += v;
    return MpsX(MatrixSet(mats), xm);
  }
};

long ipow(long b, int e) {
  long r = 1;
  for (int k = 0; k < e; ++k) r *= b;
  return r;
}

}  // namespace

long algebraic_bond_bound(const AlgebraicRls& r) {
  const long inf = static_cast<long>(r.sigma_inf.size());
  const long f = static_cast<long>(r.sigma_f.size());
  const int M = r.M();
  if (f == 1) return inf + static_cast<long>(M) * (M + 3) / 2;
  return inf + (M + 1) * ipow(f, M + 1);
}

long span_bond_bound(const SpanRls& r) {
  const long K = r.K();
  const long inf = static_cast<long>(r.sigma_inf.size());
  const long sigma = static_cast<long>(r.alphabet.size());
  const int M = r.M();
  if (sigma == 1) return K * inf + static_cast<long>(M) * (M + 3) * K / 2;
  return K * inf + (M + 1) * K * ipow(sigma, M + 1);
}

MpsX rls_to_mpsx(const AlgebraicRls& r) {
  if (r.alphabet.empty()) throw Error(ErrorKind::InvalidInput, "empty alphabet");
  if (r.M() >= 16) throw Error(ErrorKind::CapExceeded, "substitution count M must be below 16");
  BlockBuilder bb(static_cast<int>(r.alphabet.size()));

  // m = 0 terms share one diagonal block indexed by the run symbols
  bool any_m0 = false;
  for (const auto& [o, xs] : r.defining)
    if (o.size() == 1 && !o[0].empty())
      for (const auto& [x, w] : xs) any_m0 = any_m0 || !w.is_zero();
  if (any_m0) {
    for (size_t k = 0; k < r.sigma_inf.size(); ++k) {
      bb.entries[r.index_of(r.sigma_inf[k])].push_back({static_cast<int>(k), static_cast<int>(k), 1.0});
      auto it = r.defining.find(Word{r.sigma_inf[k]});
      if (it != r.defining.end())
        for (const auto& [x, w] : it->second) bb.x.push_back({static_cast<int>(k), static_cast<int>(k), w.value()});
    }
    bb.D = static_cast<int>(r.sigma_inf.size());
  }

  for (const auto& [o, xs] : r.defining) {
    const int m = static_cast<int>(o.size()) - 1;
    if (m == 0) continue;
    for (const auto& [x, w] : xs) {
      if (w.is_zero()) continue;
      const int off = bb.D;
      for (int i = 0; i <= m; ++i)
        if (!o[i].empty()) bb.entries[r.index_of(o[i])].push_back({off + i, off + i, 1.0});
      for (int i = 1; i <= m; ++i) bb.entries[r.index_of(x[i - 1])].push_back({off + i - 1, off + i, 1.0});
      bb.x.push_back({off + m, off, w.value()});
      bb.D += m + 1;
    }
  }
  if (bb.D > algebraic_bond_bound(r))
    throw Error(ErrorKind::InvalidInput, "construction exceeds the bond-dimension bound");
  return bb.finish();
}

MpsX span_rls_to_mpsx(const SpanRls& r) {
  if (r.alphabet.empty()) throw Error(ErrorKind::InvalidInput, "empty alphabet");
  if (r.M() >= 16) throw Error(ErrorKind::CapExceeded, "substitution count M must be below 16");
  BlockBuilder bb(static_cast<int>(r.alphabet.size()));
  for (const auto& [o, xs] : r.defining) {
    const int m = static_cast<int>(o.size()) - 1;
    for (const auto& [x, law] : xs) {
      if (static_cast<int>(x.size()) != m) throw Error(ErrorKind::InvalidInput, "string length does not match O");
      for (const auto& t : law) {
        if (static_cast<int>(t.lambda.size()) != m + 1)
          throw Error(ErrorKind::InvalidInput, "amplitude law needs one lambda per run");
        if (std::abs(t.alpha) == 0 || (m == 0 && o[0].empty())) continue;
        const int off = bb.D;
        for (int i = 0; i <= m; ++i)
          if (!o[i].empty()) bb.entries[r.index_of(o[i])].push_back({off + i, off + i, t.lambda[i]});
        for (int i = 1; i <= m; ++i) bb.entries[r.index_of(x[i - 1])].push_back({off + i - 1, off + i, 1.0});
        bb.x.push_back({off + m, off, t.alpha});
        bb.D += m + 1;
      }
    }
  }
  if (bb.D > span_bond_bound(r)) throw Error(ErrorKind::InvalidInput, "construction exceeds the bond-dimension bound");
  return bb.finish();
}

// ---------------------------------------------------------------- backbone

AlgebraicRls extract_backbone(const std::vector<std::vector<Weight>>& y, const MatrixSet& a_low, double tol) {
  const int b = a_low.D;
  const int n = a_low.d;
  if (static_cast<int>(y.size()) != b) throw Error(ErrorKind::InvalidInput, "Y must be b x b");
  auto name = [](int e) { return std::to_string(e); };

  // classes from the diagonal letters
  std::vector<int> cls(b, -1);
  std::vector<bool> diagonal(n, false);
  for (int e = 0; e < n; ++e) {
    const CMatrix& a = a_low[e];
    bool has_diag = false, has_upper = false;
    for (int i = 0; i < b; ++i)
      for (int j = 0; j < b; ++j) {
        const cplx v = a(i, j);
        if (std::abs(v) <= tol) continue;
        if (i > j) throw Error(ErrorKind::InvalidALow, "letter " + name(e) + " has a lower-triangular entry");
        if (i == j) {
          if (std::abs(v - cplx(1)) > tol) throw Error(ErrorKind::InvalidALow, "diagonal entries must be 0 or 1");
          has_diag = true;
        } else {
          has_upper = true;
        }
      }
    if (has_diag && has_upper) throw Error(ErrorKind::InvalidALow, "letter " + name(e) + " mixes diagonal and free parts");
    if (!has_diag) continue;
    diagonal[e] = true;
    for (int i = 0; i < b; ++i) {
      if (std::abs(a(i, i)) <= tol) continue;
      if (cls[i] >= 0) throw Error(ErrorKind::InvalidALow, "block " + std::to_string(i) + " has two diagonal letters");
      cls[i] = e;
    }
  }
  auto cname = [&](int v) { return cls[v] < 0 ? Symbol() : name(cls[v]); };

  AlgebraicRls r;
  for (int e = 0; e < n; ++e) {
    r.alphabet.push_back(name(e));
    if (diagonal[e]) r.sigma_inf.push_back(name(e));
  }
  struct Edge {
    int to, letter;
    cplx coef;
  };
  std::vector<std::vector<Edge>> edges(b);
  for (int e = 0; e < n; ++e) {
    if (diagonal[e]) continue;
    for (int i = 0; i < b; ++i)
      for (int j = i + 1; j < b; ++j) {
        const cplx v = a_low[e](i, j);
        if (std::abs(v) <= tol) continue;
        const std::pair<Symbol, Symbol> sec{cname(i), cname(j)};
        auto it = r.sector.find(name(e));
        if (it == r.sector.end()) {
          r.sector[name(e)] = sec;
          r.sigma_f.push_back(name(e));
        } else if (it->second != sec) {
          throw Error(ErrorKind::InvalidALow, "letter " + name(e) + " connects blocks of different sectors");
        }
        edges[i].push_back({j, e, v});
      }
  }

  Word o, x;
  std::function<void(int, int, cplx)> walk = [&](int start, int v, cplx coef) {
    const Weight& w = y[v][start];
    if (!(o.size() == 1 && cls[v] < 0) && !w.is_zero(0)) {
      Weight add = coef * w;
      r.defining[o][x] += add;
    }
    for (const auto& ed : edges[v]) {
      o.push_back(cname(ed.to));
      x.push_back(name(ed.letter));
      walk(start, ed.to, coef * ed.coef);
      o.pop_back();
      x.pop_back();
    }
  };
  for (int i = 0; i < b; ++i) {
    o = {cname(i)};
    x.clear();
    walk(i, i, 1.0);
  }
  r.drop_zero_weights(0);
  return r;
}

AlgebraicRls extract_backbone(const CMatrix& y, const MatrixSet& a_low, double tol) {
  std::vector<std::vector<Weight>> w(y.rows(), std::vector<Weight>(y.cols()));
  for (int i = 0; i < y.rows(); ++i)
    for (int j = 0; j < y.cols(); ++j) w[i][j] = constant_weight(y(i, j));
  AlgebraicRls r = extract_backbone(w, a_low, tol);
  r.drop_zero_weights(tol * std::max(1.0, max_abs(y)));
  return r;
}

// ---------------------------------------------------------------- Gamma-blocking

CMatrix gamma_power(const GammaTensor& g, int alpha) {
  const int d = g.n;
  CMatrix cur = CMatrix::Identity(d, d);
  for (int l = 2; l <= alpha; ++l) {
    const long rows = cur.rows();
    CMatrix next = CMatrix::Zero(d * rows, d);
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i)
        for (int m = 0; m < d; ++m) {
          const cplx c = g(i, m, k);
          if (c == cplx(0)) continue;
          next.block(i * rows, k, rows, 1) += c * cur.col(m);
        }
    cur = next;
  }
  return cur;
}

bool gamma_block_check(const AlgebraicRls& r, const GammaTensor& g, int alpha, int beta, long amp_cap, double tol) {
  const int d = static_cast<int>(r.alphabet.size());
  if (g.n != d) throw Error(ErrorKind::InvalidInput, "Gamma and the RLS use different alphabets");
  if (alpha < 1 || beta < 1) throw Error(ErrorKind::InvalidInput, "alpha and beta must be positive");
  if (std::pow(static_cast<double>(d), alpha * beta) > static_cast<double>(amp_cap))
    throw Error(ErrorKind::CapExceeded, "d^(alpha*beta) exceeds the amplitude cap");
  const MpsX m = rls_to_mpsx(r);
  const CVector fine = generate_state(m, alpha * beta, amp_cap);
  CVector cur = generate_state(m, beta, amp_cap);
  const CMatrix G = gamma_power(g, alpha);
  const long dout = G.rows();

  // apply G to every leg, left to right: legs before are already fine
  long before = 1;
  long after = static_cast<long>(cur.size()) / d;
  for (int leg = 0; leg < beta; ++leg) {
    CVector next = CVector::Zero(before * dout * after);
    for (long a = 0; a < before; ++a)
      for (long i = 0; i < d; ++i)
        for (long c = 0; c < after; ++c) {
          const cplx v = cur[(a * d + i) * after + c];
          if (v == cplx(0)) continue;
          for (long o = 0; o < dout; ++o) next[(a * dout + o) * after + c] += G(o, i) * v;
        }
    cur = next;
    before *= dout;
    after /= d;
  }
  const double scale = std::max({1.0, max_abs(fine), max_abs(cur)});
  return max_abs(fine - cur) <= tol * scale;
}

GammaTensor gamma_from_json(const std::string& text, const std::vector<Symbol>& alphabet) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("Gamma JSON: ") + e.what());
  }
  try {
    std::vector<Symbol> syms;
    for (const auto& s : j.at("symbols")) syms.push_back(s.is_string() ? s.get<std::string>() : s.dump());
    std::vector<Symbol> order = alphabet.empty() ? syms : alphabet;
    if (natural_order(syms) != natural_order(order))
      throw Error(ErrorKind::InvalidInput, "Gamma symbols do not match the alphabet");
    auto idx = [&](const nlohmann::json& s) {
      const Symbol name = s.is_string() ? s.get<std::string>() : s.dump();
      auto it = std::find(order.begin(), order.end(), name);
      if (it == order.end()) throw Error(ErrorKind::InvalidInput, "unknown Gamma symbol " + name);
      return static_cast<int>(it - order.begin());
    };
    GammaTensor g;
    g.n = static_cast<int>(order.size());
    g.g.assign(static_cast<size_t>(g.n) * g.n * g.n, 0);
    for (const auto& e : j.at("entries")) {
      cplx w = 1;
      if (e.contains("w")) {
        const auto& v = e.at("w");
        w = v.is_array() ? cplx(v.at(0).get<double>(), v.at(1).get<double>()) : cplx(v.get<double>());
      }
      g(idx(e.at("in").at(0)), idx(e.at("in").at(1)), idx(e.at("out"))) += w;
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("Gamma JSON: ") + e.what());
  }
}

std::string gamma_to_json(const GammaTensor& g, const std::vector<Symbol>& symbols) {
  nlohmann::json j;
  j["symbols"] = symbols;
  j["entries"] = nlohmann::json::array();
  for (int p = 0; p < g.n; ++p)
    for (int q = 0; q < g.n; ++q)
      for (int r = 0; r < g.n; ++r) {
        const cplx v = g(p, q, r);
        if (std::abs(v) <= 1e-12) continue;
        j["entries"].push_back({{"out", symbols[r]}, {"in", {symbols[p], symbols[q]}}, {"w", {v.real(), v.imag()}}});
      }
  return j.dump();
}

}  // namespace mpsx
