/** @file mpsx.cpp
 * Command-line front end: analyze, gcf, compare, rls, stability, ti, state.
 * Exit codes: 0 ok, 2 input, 3 uncertain, 4 not stable, 5 not TI, 6 cap.
 */
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mpsx/equivalence.hpp"
#include "mpsx/io.hpp"
#include "mpsx/rls.hpp"

using namespace mpsx;
using json = nlohmann::ordered_json;

namespace {

struct ExitError {
  int code;
  std::string msg;
};

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidInput:
    case ErrorKind::SyntaxError:
    case ErrorKind::SectorConflict:
    case ErrorKind::InvalidALow:
    case ErrorKind::InvalidMode: return 2;
    case ErrorKind::NotStable: return 4;
    case ErrorKind::NotTI: return 5;
    case ErrorKind::CapExceeded: return 6;
    default: return 3;
  }
}

std::string read_text(const std::string& path) {
  std::stringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw ExitError{2, "cannot read " + path};
    ss << in.rdbuf();
  }
  return ss.str();
}

json cj(cplx v) { return json::array({v.real(), v.imag()}); }

std::string fmt_cplx(cplx v) {
  std::ostringstream os;
  os.precision(12);
  if (v.imag() == 0)
    os << v.real();
  else
    os << "(" << v.real() << (v.imag() < 0 ? "" : "+") << v.imag() << "i)";
  return os.str();
}

json length_json(long l) { return l == kInfinite ? json("infinite") : json(l); }

json options_json(const Options& o) {
  return {{"tol", o.tol},         {"cap_phys", o.cap_phys}, {"cap_len", o.cap_len},  {"seed", o.seed},
          {"q_max", o.q_max},     {"m_ell_max", o.m_ell_max}, {"verify_n", o.verify_n}, {"amp_cap", o.amp_cap}};
}

Options options_from_json(const json& j, Options o) {
  o.tol = j.value("tol", o.tol);
  o.cap_phys = j.value("cap_phys", o.cap_phys);
  o.cap_len = j.value("cap_len", o.cap_len);
  o.seed = j.value("seed", o.seed);
  o.q_max = j.value("q_max", o.q_max);
  o.m_ell_max = j.value("m_ell_max", o.m_ell_max);
  o.verify_n = j.value("verify_n", o.verify_n);
  o.amp_cap = j.value("amp_cap", o.amp_cap);
  return o;
}

json basis_json(const StructuredBasis& sb) {
  json labels = json::array();
  for (const auto& lab : sb.labels)
    labels.push_back({{"name", lab.name},
                      {"diagonal", lab.diagonal},
                      {"sector", {lab.r1, lab.r2}},
                      {"block", {lab.i0, lab.j0}},
                      {"shape", {lab.rows, lab.cols}}});
  json k = json::array();
  for (int i = 0; i < sb.b(); ++i)
    for (int j = i; j < sb.b(); ++j)
      for (int e = 0; e < sb.n_labels(); ++e)
        if (sb.k[i][j][e] != cplx(0)) k.push_back({{"block", {i, j}}, {"label", sb.labels[e].name}, {"w", cj(sb.k[i][j][e])}});
  json sigma_inf = json::array(), sigma_f = json::object();
  for (const auto& lab : sb.labels) {
    if (lab.diagonal) {
      sigma_inf.push_back(lab.name);
    } else {
      const std::string key = std::to_string(lab.r1) + "," + std::to_string(lab.r2);
      if (!sigma_f.contains(key)) sigma_f[key] = json::array();
      sigma_f[key].push_back(lab.name);
    }
  }
  return {{"b", sb.b()},          {"sizes", sb.sizes},         {"block_class", sb.block_class},
          {"n_inf", sb.n_inf},    {"sigma_inf", sigma_inf},    {"sigma_f", sigma_f},
          {"labels", labels},     {"k", k}};
}

json gamma_json(const StructuredBasis& sb, const GammaTensor& g) {
  json nz = json::array();
  for (int p = 0; p < g.n; ++p)
    for (int q = 0; q < g.n; ++q)
      for (int r = 0; r < g.n; ++r)
        if (g(p, q, r) != cplx(0))
          nz.push_back({{"out", sb.labels[r].name}, {"in", {sb.labels[p].name, sb.labels[q].name}}, {"w", cj(g(p, q, r))}});
  const GammaChecks c = check_gamma(sb, g);
  return {{"nonzeros", nz}, {"associativity_residual", c.assoc}, {"idempotent_residual", c.p1},
          {"sector_residual", std::max(c.p2, c.p3)}};
}

json stability_json(const StabilityReport& s) {
  return {{"verdict", verdict_name(s.verdict)},
          {"witness", s.witness},
          {"witness_mu", cj(s.witness_mu)},
          {"p", s.p},
          {"q", length_json(s.q)},
          {"b", s.b},
          {"identity0_length", length_json(s.identity0_length)},
          {"stable_length", length_json(s.stable_length)},
          {"alg_dim", s.alg_dim},
          {"r_alg", s.r_alg},
          {"probed_dims", s.probed_dims},
          {"bounds", {{"stabilization", s.bound_stab}, {"block_injectivity", s.bound_lbi}, {"r_alg", s.bound_ralg}}}};
}

json header(const std::string& cmd, const Options& opt, const MpsX& m) {
  return {{"command", cmd}, {"options", options_json(opt)}, {"input", json::parse(mpsx_to_json(m))},
          {"d", m.d()},     {"D", m.D()}};
}

json cmd_analyze(const MpsX& m, const Options& opt) {
  json r = header("analyze", opt, m);
  const StructureAnalysis sa = analyze_structure(m.tensor, opt);
  r["structure"] = {{"p", sa.p}, {"q", length_json(sa.tri.part.q)}};
  const StructuredBasis sb = build_structured_basis(sa, BasisMode::Algebra, 1, opt);
  r["basis"] = basis_json(sb);
  r["gamma"] = gamma_json(sb, gamma_tensor(sb, opt.tol));
  r["stability"] = stability_json(check_stability(m.tensor, opt));
  return r;
}

json cmd_gcf(const MpsX& m, const Options& opt) {
  json r = header("gcf", opt, m);
  const GcfResult g = assemble_gcf(m, opt);
  const StructuredBasis& sb = g.cf.basis;
  r["stability"] = stability_json(g.stability);
  r["block_length"] = g.block_length;
  r["basis"] = basis_json(sb);
  r["gamma"] = gamma_json(sb, g.gamma);
  json beta = json::object();
  for (const auto& [name, v] : g.beta_values()) beta[name] = cj(v);
  r["ti"] = {{"is_ti", g.ti.is_ti},
             {"beta", beta},
             {"residual_i", *std::max_element(g.ti.residual_i.begin(), g.ti.residual_i.end())},
             {"residual_ii", g.ti.residual_ii}};
  r["backbone"] = format_rls(g.backbone);
  r["backbone_values"] = format_rls(g.backbone_values);
  r["block_injectivity"] = {{"length", length_json(g.injectivity.length)},
                            {"certificate_residual", g.injectivity.certificate_residual},
                            {"bound", sb.D * sb.D}};
  r["verify_residuals"] = g.verify_residuals;
  r["gamma_invariant"] = g.gamma_invariant;
  return r;
}

json cmd_stability(const MpsX& m, const Options& opt, int& code) {
  json r = header("stability", opt, m);
  const StabilityReport s = check_stability(m.tensor, opt);
  r["stability"] = stability_json(s);
  code = s.verdict == StabilityVerdict::Stable ? 0 : s.verdict == StabilityVerdict::NotStable ? 4 : 3;
  return r;
}

json cmd_ti(const MpsX& m, const Options& opt, int& code) {
  json r = header("ti", opt, m);
  const bool general = ti_check_general(m, opt.tol);
  r["ti"] = {{"is_ti", general}};
  const StructureAnalysis sa = analyze_structure(m.tensor, opt);
  if (sa.p == 1) {
    const StructuredBasis sb = build_structured_basis(sa, BasisMode::Algebra, 1, opt);
    const MatrixCF cf = matrix_cf(m.tensor, sb, 1, opt.tol);
    const TiReport t = simplify_boundary(m, cf.basis, gamma_tensor(cf.basis, opt.tol), opt.tol);
    json beta = json::object();
    for (int e = 0; e < sb.n_labels(); ++e) beta["b" + sb.labels[e].name] = cj(t.beta[e]);
    r["ti"]["structured"] = {{"is_ti", t.is_ti},
                             {"beta", beta},
                             {"residual_i", *std::max_element(t.residual_i.begin(), t.residual_i.end())},
                             {"residual_ii", t.residual_ii}};
  }
  code = general ? 0 : 5;
  return r;
}

std::string symbols_word(const std::vector<int>& w, const std::vector<std::string>& alphabet) {
  bool single = true;
  for (const auto& s : alphabet) single = single && s.size() == 1;
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    if (!single && i > 0) out += " ";
    out += alphabet[w[i]];
  }
  return out;
}

json amplitudes_json(const MpsX& m, int N, const std::vector<std::string>& alphabet, long cap, double tol) {
  const CVector s = generate_state(m, N, cap);
  const double scale = std::max(1.0, max_abs(s));
  json out = json::array();
  std::vector<int> w(N, 0);
  for (long k = 0; k < s.size(); ++k) {
    long r = k;
    for (int i = N - 1; i >= 0; --i) {
      w[i] = static_cast<int>(r % m.d());
      r /= m.d();
    }
    if (std::abs(s[k]) > tol * scale) out.push_back({{"word", symbols_word(w, alphabet)}, {"w", cj(s[k])}});
  }
  return out;
}

std::vector<std::string> digit_alphabet(int d) {
  std::vector<std::string> a;
  for (int x = 0; x < d; ++x) a.push_back(std::to_string(x));
  return a;
}

void render_text(const json& j, const std::string& path, std::ostream& os) {
  if (j.is_object()) {
    for (const auto& [key, val] : j.items()) {
      if (path.empty() && key == "input") continue;
      render_text(val, path.empty() ? key : path + "." + key, os);
    }
  } else if (j.is_array() && !j.empty() && j[0].is_object()) {
    for (size_t i = 0; i < j.size(); ++i) render_text(j[i], path + "[" + std::to_string(i) + "]", os);
  } else {
    os << path << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

void emit(const json& r, bool as_json) {
  if (as_json)
    std::cout << r.dump(2) << "\n";
  else
    render_text(r, "", std::cout);
}

MpsX load_mpsx(const std::string& path) { return mpsx_from_json(read_text(path)); }

std::map<std::string, cplx> parse_binds(const std::vector<std::string>& binds) {
  std::map<std::string, cplx> out;
  for (const auto& b : binds) {
    const auto eq = b.find('=');
    if (eq == std::string::npos) throw ExitError{2, "--bind expects name=value or name=re,im"};
    const std::string val = b.substr(eq + 1);
    const auto comma = val.find(',');
    try {
      out[b.substr(0, eq)] = comma == std::string::npos ? cplx(std::stod(val))
                                                        : cplx(std::stod(val.substr(0, comma)), std::stod(val.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ExitError{2, "bad --bind value " + b};
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Canonical forms and equivalence of uniform MPS with boundary"};
  app.require_subcommand(1);
  Options opt;
  if (const char* env = std::getenv("MPSX_TOL")) {
    try {
      opt.tol = std::stod(env);
    } catch (const std::exception&) {
      std::cerr << "error: MPSX_TOL is not a number\n";
      return 2;
    }
  }
  bool as_json = false;
  std::string from_report;
  app.add_option("--tol", opt.tol, "numerical tolerance");
  app.add_option("--cap-phys", opt.cap_phys, "largest d^l materialized by blocking");
  app.add_option("--cap-len", opt.cap_len, "largest probed length");
  app.add_option("--qmax", opt.q_max, "largest root-of-unity order searched");
  app.add_option("--seed", opt.seed, "random seed");
  app.add_option("--verify-n", opt.verify_n, "largest N used to verify the gCF");
  app.add_option("--amp-cap", opt.amp_cap, "largest number of amplitudes generated");
  app.add_flag("--json", as_json, "print the report as JSON");
  app.add_option("--from-report", from_report, "rerun a command on the input stored in a JSON report (- for stdin)");
  app.fallthrough();

  std::string file, file_b, expr, to_mpsx;
  int n_sites = 0;
  bool relation = false;
  std::vector<std::string> check_args;
  std::vector<std::string> binds;
  auto* analyze = app.add_subcommand("analyze", "structure, structured basis, Gamma and stability");
  auto* gcf = app.add_subcommand("gcf", "generalized canonical form");
  auto* stability = app.add_subcommand("stability", "stability verdict (exit 4 when not stable, 3 when undecided)");
  auto* ti = app.add_subcommand("ti", "translation invariance of the boundary (exit 5 when violated)");
  for (auto* sc : {analyze, gcf, stability, ti}) sc->add_option("file", file, "MPS-X JSON file");
  auto* state = app.add_subcommand("state", "nonzero amplitudes of the N-site state");
  state->add_option("file", file, "MPS-X JSON file")->required();
  state->add_option("N", n_sites, "number of sites")->required();
  auto* compare = app.add_subcommand("compare", "exact equality of two families");
  compare->add_option("a", file, "first MPS-X file")->required();
  compare->add_option("b", file_b, "second MPS-X file")->required();
  compare->add_flag("--relation", relation, "also reduce the pair and print the stacking relation");
  auto* rls = app.add_subcommand("rls", "algebraic regular-language states");
  rls->add_option("expr", expr, "expression, or a file holding one")->required();
  rls->add_option("--to-mpsx", to_mpsx, "write the MPS-X construction (- for stdout)");
  rls->add_option("--check-gamma", check_args, "Gamma-blocking verdict: GAMMA_JSON ALPHA BETA")->expected(3);
  rls->add_option("--state", n_sites, "print the amplitudes on N sites");
  rls->add_option("--bind", binds, "parameter value, name=re or name=re,im");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    auto input = [&]() -> MpsX {
      if (!from_report.empty()) {
        json rep;
        try {
          rep = json::parse(read_text(from_report));
        } catch (const json::parse_error& e) {
          throw ExitError{2, std::string("malformed report: ") + e.what()};
        }
        if (!rep.contains("input")) throw ExitError{2, "report has no input section"};
        if (rep.contains("options")) opt = options_from_json(rep["options"], opt);
        return mpsx_from_json(rep["input"].dump());
      }
      if (file.empty()) throw ExitError{2, "missing input file"};
      return load_mpsx(file);
    };

    int code = 0;
    if (*analyze) {
      const MpsX m = input();
      emit(cmd_analyze(m, opt), as_json);
    } else if (*gcf) {
      const MpsX m = input();
      emit(cmd_gcf(m, opt), as_json);
    } else if (*stability) {
      const MpsX m = input();
      emit(cmd_stability(m, opt, code), as_json);
    } else if (*ti) {
      const MpsX m = input();
      emit(cmd_ti(m, opt, code), as_json);
    } else if (*state) {
      const MpsX m = input();
      json r = header("state", opt, m);
      r["N"] = n_sites;
      r["amplitudes"] = amplitudes_json(m, n_sites, digit_alphabet(m.d()), opt.amp_cap, opt.tol);
      if (as_json) {
        emit(r, true);
      } else {
        for (const auto& a : r["amplitudes"])
          std::cout << a["word"].get<std::string>() << " " << fmt_cplx({a["w"][0], a["w"][1]}) << "\n";
      }
    } else if (*compare) {
      const MpsX a = load_mpsx(file), b = load_mpsx(file_b);
      if (a.d() != b.d()) throw ExitError{2, "physical dimensions differ"};
      const WfaComparison c = wfa_compare(to_wfa(a, opt.seed), to_wfa(b, opt.seed));
      json r = {{"command", "compare"},
                {"verdict", c.equal ? "EQUIVALENT" : "DIFFERENT"},
                {"word", word_string(c.word, a.d())},
                {"explored", c.explored}};
      if (relation && c.equal) {
        const ReducedPair red = reduce_pair(a, b, opt.tol);
        json proj = json::array();
        for (int i = 0; i < red.projector.rows(); ++i)
          for (int j = 0; j < red.projector.cols(); ++j) proj.push_back(cj(red.projector(i, j)));
        r["reduction"] = {{"common_dim", red.common.dim()}, {"projector", proj}};
        const GaugeRelation rel = stack_and_relate(red.a, red.b, 1, opt);
        json pb = json::array();
        for (int s = 0; s < rel.p_b.cols(); ++s) {
          json col = json::object();
          for (int t = 0; t < rel.p_b.rows(); ++t)
            if (rel.p_b(t, s) != cplx(0)) col[rel.c_labels[t]] = cj(rel.p_b(t, s));
          pb.push_back({{"from", rel.b_labels[s]}, {"to", col}});
        }
        json alpha = json::array();
        for (cplx v : rel.alpha) alpha.push_back(cj(v));
        r["relation"] = {{"pi", rel.pi},         {"alpha", alpha},       {"c_labels", rel.c_labels},
                         {"n_extra", rel.n_extra}, {"p_b", pb},          {"residual", rel.residual}};
      }
      if (as_json) {
        emit(r, true);
      } else {
        std::cout << r["verdict"].get<std::string>();
        if (!c.equal) std::cout << " " << r["word"].get<std::string>();
        std::cout << "\n";
        if (r.contains("relation")) {
          r.erase("verdict");
          r.erase("word");
          render_text(r, "", std::cout);
        }
      }
    } else if (*rls) {
      std::string text = expr;
      {
        std::ifstream in(expr);
        if (in) {
          std::stringstream ss;
          ss << in.rdbuf();
          text = ss.str();
        }
      }
      const AlgebraicRls sym = parse_rls(text);
      AlgebraicRls r = sym.bound(parse_binds(binds));
      if (!check_args.empty()) {
        int alpha = 0, beta = 0;
        try {
          alpha = std::stoi(check_args[1]);
          beta = std::stoi(check_args[2]);
        } catch (const std::exception&) {
          throw ExitError{2, "--check-gamma expects GAMMA_JSON ALPHA BETA"};
        }
        if (alpha < 1 || beta < 1) throw ExitError{2, "alpha and beta must be positive"};
        const GammaTensor g = gamma_from_json(read_text(check_args[0]), r.alphabet);
        const bool ok = gamma_block_check(r, g, alpha, beta, opt.amp_cap, 1e-7);
        if (as_json)
          emit({{"command", "rls"}, {"alpha", alpha}, {"beta", beta}, {"invariant", ok}}, true);
        else
          std::cout << (ok ? "INVARIANT" : "NOT INVARIANT") << "\n";
      } else if (!to_mpsx.empty()) {
        const MpsX m = rls_to_mpsx(r);
        const std::string out = mpsx_to_json(m, 2) + "\n";
        if (to_mpsx == "-") {
          std::cout << out;
        } else {
          std::ofstream os(to_mpsx);
          if (!os) throw ExitError{2, "cannot write " + to_mpsx};
          os << out;
        }
      } else if (n_sites > 0) {
        const MpsX m = rls_to_mpsx(r);
        const json amps = amplitudes_json(m, n_sites, r.alphabet, opt.amp_cap, opt.tol);
        if (as_json) {
          emit({{"command", "rls"}, {"N", n_sites}, {"amplitudes", amps}}, true);
        } else {
          for (const auto& a : amps)
            std::cout << a["word"].get<std::string>() << " " << fmt_cplx({a["w"][0], a["w"][1]}) << "\n";
        }
      } else {
        json rep = {{"command", "rls"},
                    {"rls", format_rls(sym)},
                    {"alphabet", r.alphabet},
                    {"sigma_inf", r.sigma_inf},
                    {"sigma_f", r.sigma_f},
                    {"bond_bound", algebraic_bond_bound(r)},
                    {"bond_dimension", rls_to_mpsx(r).D()}};
        emit(rep, as_json);
      }
    }
    return code;
  } catch (const ExitError& e) {
    std::cerr << "error: " << e.msg << "\n";
    return e.code;
  } catch (const Error& e) {
    std::cerr << "error (" << error_kind_name(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  }
}
