#include "ellbf/verifier.hpp"

#include <fstream>
#include <sstream>

#include "ellbf/errors.hpp"
#include "ellbf/iwasawa.hpp"
#include "ellbf/numutil.hpp"
#include "ellbf/padic.hpp"

namespace ellbf {

// ---------------------------------------------------------------------------
// fixtures

SelmerFixture fixture_from_json(const nlohmann::json& j) {
  SelmerFixture f;
  try {
    f.curve_label = j.at("curve_label").get<std::string>();
    auto coeffs = j.at("coefficients").get<std::vector<long long>>();
    if (coeffs.size() != 5) throw validation_error("coefficients: expected 5 integers");
    std::copy(coeffs.begin(), coeffs.end(), f.coefficients.begin());
    f.p = j.at("p").get<long>();
    f.n = j.at("n").get<int>();
    f.sel_p_infty_order = mpz_class(j.at("sel_p_infty_order").get<std::string>());
    f.rank = j.at("rank").get<int>();
    f.torsion_p_part = mpz_class(j.at("torsion_p_part").get<std::string>());
    f.assert_Ep_irreducible = j.at("assert_Ep_irreducible").get<bool>();
    f.source = j.at("source").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("fixture: ") + e.what());
  }
  if (f.p < 3 || !is_prime(mpz_class(f.p)))
    throw validation_error("fixture: p must be an odd prime");
  if (f.n < 0) throw validation_error("fixture: n must be >= 0");
  if (f.rank < 0) throw validation_error("fixture: rank must be >= 0");
  if (!is_p_power(f.sel_p_infty_order, mpz_class(f.p)))
    throw validation_error("fixture: sel_p_infty_order is not a power of p");
  if (!is_p_power(f.torsion_p_part, mpz_class(f.p)))
    throw validation_error("fixture: torsion_p_part is not a power of p");
  if (f.source.empty()) throw validation_error("fixture: source provenance text is required");
  curve_from_list(f.coefficients);  // throws on singular / nonminimal models
  return f;
}

SelmerFixture load_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open fixture: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("fixture parse: ") + e.what());
  }
  return fixture_from_json(j);
}

nlohmann::ordered_json fixture_to_json(const SelmerFixture& f) {
  nlohmann::ordered_json j;
  j["curve_label"] = f.curve_label;
  j["coefficients"] = std::vector<long long>(f.coefficients.begin(), f.coefficients.end());
  j["p"] = f.p;
  j["n"] = f.n;
  j["sel_p_infty_order"] = f.sel_p_infty_order.get_str();
  j["rank"] = f.rank;
  j["torsion_p_part"] = f.torsion_p_part.get_str();
  j["assert_Ep_irreducible"] = f.assert_Ep_irreducible;
  j["source"] = f.source;
  return j;
}

// ---------------------------------------------------------------------------
// assumptions

std::vector<AssumptionCheck> check_assumptions(const EllipticCurve& E, long p, int n,
                                               const SelmerFixture& fix, bool theorem_mode) {
  std::vector<AssumptionCheck> log;
  auto add = [&](std::string name, bool ok, std::string detail, bool warning = false) {
    log.push_back({std::move(name), ok, warning, std::move(detail)});
  };

  bool p_ok = (p >= 3) && is_prime(mpz_class(p));
  add("p_odd_prime", p_ok, "p = " + std::to_string(p));

  bool ordinary = false;
  if (p_ok) {
    ordinary = is_good_ordinary(E, p);
    add("good_ordinary_at_p", ordinary,
        ordinary ? "p does not divide disc or a_p" : "p divides disc or a_p");
  } else {
    add("good_ordinary_at_p", false, "skipped: p invalid");
  }

  bool semistable = true;
  std::string ss_detail;
  for (const auto& v : E.bad_primes) {
    try {
      LocalData d = local_data_semistable(E, v);
      ss_detail += "I_" + std::to_string(d.kodaira_n) + "@" + v.get_str() + " ";
    } catch (const additive_reduction_error&) {
      semistable = false;
      ss_detail = "additive reduction at " + v.get_str();
      break;
    }
  }
  add("semistable", semistable, ss_detail);

  if (semistable) {
    bool comp_ok = true;
    std::string detail;
    for (const auto& v : E.bad_primes) {
      LocalData d = local_data_semistable(E, v);
      if (d.component_order % p == 0) {
        comp_ok = false;
        detail += "p | component order " + std::to_string(d.component_order) + " at " +
                  v.get_str() + " ";
      }
    }
    add("component_group_prime_to_p", comp_ok,
        comp_ok ? "all local component orders prime to p" : detail);
  } else {
    add("component_group_prime_to_p", false, "skipped: not semistable");
  }

  bool fixture_match = true;
  {
    EllipticCurve fixE = curve_from_list(fix.coefficients);
    if (fixE.c4 != E.c4 || fixE.c6 != E.c6 || fixE.disc != E.disc) fixture_match = false;
    if (fix.p != p || fix.n != n) fixture_match = false;
    add("fixture_matches_input", fixture_match,
        fixture_match ? "" : "fixture (curve, p, n) differs from the requested triple");
  }

  if (theorem_mode) {
    add("rank_zero", fix.rank == 0, "rank = " + std::to_string(fix.rank));
    add("trivial_p_torsion", fix.torsion_p_part == 1,
        "|E(Q_n)[p^oo]| = " + fix.torsion_p_part.get_str());
  }

  if (p_ok) {
    TorsionInfo tors = torsion_order(E, p);
    if (n == 0) {
      bool consistent = (mpz_class(tors.p_part) == fix.torsion_p_part);
      add("fixture_torsion_matches_curve", consistent,
          "computed p-part over Q: " + std::to_string(tors.p_part) + ", fixture: " +
              fix.torsion_p_part.get_str());
    }
    if (fix.assert_Ep_irreducible && tors.p_part > 1) {
      add("Ep_irreducible_heuristic", false,
          "warning: torsion has a p-part, contradicting the asserted irreducibility of E[p]",
          true);
    } else {
      add("Ep_irreducible_asserted", fix.assert_Ep_irreducible,
          fix.assert_Ep_irreducible ? "asserted by fixture"
                                    : "fixture does not assert E[p] irreducible",
          !fix.assert_Ep_irreducible);
    }
  }
  return log;
}

// ---------------------------------------------------------------------------
// analytic side

int lhs_valuation(SymbolEngine& eng, long p, int n, int M, int max_retries, int* M_used) {
  int tries = 0;
  for (;;) {
    try {
      IwasawaElement G = stabilized_Lp(eng, p, n, M);
      int v = product_valuation(G, n);
      if (M_used) *M_used = M;
      return v;
    } catch (const precision_error& e) {
      if (++tries > max_retries) throw;
      M = e.suggested_precision();
    }
  }
}

// ---------------------------------------------------------------------------
// arithmetic side

int primes_above(long ell, long p, int n) {
  if (ell == p) throw domain_error("primes_above: ell must differ from p");
  if (n == 0) return 1;
  OneUnitLog lg(p, n);
  long k = lg.log_of(mpz_class(ell));
  mpz_class pn = pow_p(p, n);
  mpz_class g;
  mpz_class kk(k);
  mpz_gcd(g.get_mpz_t(), kk.get_mpz_t(), pn.get_mpz_t());
  return static_cast<int>(g.get_si());
}

int primes_above_direct(long ell, long p, int n) {
  // residue degree = least f with ell^f in the Teichmueller subgroup mod p^{n+1}
  mpz_class q = pow_p(p, n + 1);
  mpz_class x = 1;
  mpz_class base(ell % p == 0 ? 0 : ell);
  if (base == 0) throw domain_error("primes_above_direct: ell must differ from p");
  for (long f = 1;; ++f) {
    x = x * base % q;
    if (powmod(x, mpz_class(p - 1), q) == 1)
      return static_cast<int>(pow_p(p, n).get_si() / f);
  }
}

RhsFactors rhs_value(const EllipticCurve& E, long p, int n, const SelmerFixture& fix) {
  RhsFactors out;
  mpz_class count = count_points(E, mpz_class(p)).count;  // #E~(F_p) = p + 1 - a_p
  mpz_class red = p_part(count, mpz_class(p));
  out.reduction_factor = red * red;

  out.tamagawa_factor = 1;
  for (const auto& v : E.bad_primes) {
    if (v == p) continue;  // good ordinary at p excludes this anyway
    LocalData d = local_data_semistable(E, v);
    mpz_class cp = p_part(mpz_class(d.tamagawa), mpz_class(p));
    if (cp == 1) continue;
    int g = primes_above(v.get_si(), p, n);
    for (int i = 0; i < g; ++i) out.tamagawa_factor *= cp;
  }

  out.path_integral_limit = fix.sel_p_infty_order;
  return out;
}

// ---------------------------------------------------------------------------
// theorem and key lemma checks

namespace {

void require_assumptions(const std::vector<AssumptionCheck>& log) {
  for (const auto& c : log)
    if (!c.ok && !c.warning_only)
      throw domain_error("assumption failed: " + c.name +
                         (c.detail.empty() ? "" : " (" + c.detail + ")"));
}

}  // namespace

TheoremReport check_theorem(SymbolEngine& eng, long p, int n, const SelmerFixture& fix,
                            const VerifyConfig& cfg) {
  TheoremReport r;
  r.p = p;
  r.n = n;
  r.assumption_log = check_assumptions(eng.curve(), p, n, fix, /*theorem_mode=*/true);
  require_assumptions(r.assumption_log);

  int m_used = cfg.padic_precision;
  r.lhs_valuation = lhs_valuation(eng, p, n, cfg.padic_precision, cfg.max_retries, &m_used);
  r.lhs_value = pow_p(p, r.lhs_valuation);
  r.padic_precision_used = m_used;

  RhsFactors f = rhs_value(eng.curve(), p, n, fix);
  r.reduction_factor = f.reduction_factor;
  r.tamagawa_factor = f.tamagawa_factor;
  r.path_integral_limit = f.path_integral_limit;
  r.rhs_value = f.reduction_factor * f.tamagawa_factor * f.path_integral_limit;
  r.pass = (r.lhs_value == r.rhs_value);
  return r;
}

TheoremReport check_theorem(const EllipticCurve& E, long p, int n, const SelmerFixture& fix,
                            const VerifyConfig& cfg) {
  SymbolEngine eng(E, SymbolEngine::Options{cfg.float_bits, cfg.denom_bound, cfg.cache_dir});
  return check_theorem(eng, p, n, fix, cfg);
}

KeyLemmaReport check_keylemma(SymbolEngine& eng, long p, int n, const SelmerFixture& fix,
                              const VerifyConfig& cfg) {
  KeyLemmaReport r;
  r.p = p;
  r.n = n;
  r.assumption_log = check_assumptions(eng.curve(), p, n, fix, /*theorem_mode=*/false);
  require_assumptions(r.assumption_log);
  r.verdict_mode = (fix.rank == 0 && fix.torsion_p_part == 1);

  int m_used = cfg.padic_precision;
  r.lhs_valuation = lhs_valuation(eng, p, n, cfg.padic_precision, cfg.max_retries, &m_used);
  r.padic_precision_used = m_used;
  r.sel_valuation = static_cast<int>(ord_p(fix.sel_p_infty_order, mpz_class(p)));

  RhsFactors f = rhs_value(eng.curve(), p, n, fix);
  r.error_ratio_valuation =
      static_cast<int>(ord_p(f.reduction_factor * f.tamagawa_factor, mpz_class(p)));
  r.residual = r.lhs_valuation - r.sel_valuation - r.error_ratio_valuation;
  r.pass = r.verdict_mode && r.residual == 0;
  return r;
}

KeyLemmaReport check_keylemma(const EllipticCurve& E, long p, int n, const SelmerFixture& fix,
                              const VerifyConfig& cfg) {
  SymbolEngine eng(E, SymbolEngine::Options{cfg.float_bits, cfg.denom_bound, cfg.cache_dir});
  return check_keylemma(eng, p, n, fix, cfg);
}

// ---------------------------------------------------------------------------
// reports

namespace {

nlohmann::ordered_json curve_json(const EllipticCurve& E) {
  nlohmann::ordered_json j;
  std::vector<std::string> a;
  for (const auto& c : E.a) a.push_back(c.get_str());
  j["a_invariants"] = a;
  j["disc"] = E.disc.get_str();
  std::vector<std::string> bad;
  for (const auto& v : E.bad_primes) bad.push_back(v.get_str());
  j["bad_primes"] = bad;
  return j;
}

nlohmann::ordered_json assumptions_json(const std::vector<AssumptionCheck>& log) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : log) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["ok"] = c.ok;
    if (c.warning_only) e["warning_only"] = true;
    if (!c.detail.empty()) e["detail"] = c.detail;
    arr.push_back(e);
  }
  return arr;
}

std::string assumptions_text(const std::vector<AssumptionCheck>& log) {
  std::ostringstream os;
  for (const auto& c : log) {
    os << "  [" << (c.ok ? (c.warning_only ? "warn" : " ok ") : (c.warning_only ? "warn" : "FAIL"))
       << "] " << c.name;
    if (!c.detail.empty()) os << ": " << c.detail;
    os << "\n";
  }
  return os.str();
}

}  // namespace

nlohmann::ordered_json report_to_json(const TheoremReport& r, const EllipticCurve& E) {
  nlohmann::ordered_json j;
  j["check"] = "path_integral_identity";
  j["curve"] = curve_json(E);
  j["p"] = r.p;
  j["n"] = r.n;
  j["lhs_valuation"] = r.lhs_valuation;
  j["lhs_value"] = r.lhs_value.get_str();
  j["reduction_factor"] = r.reduction_factor.get_str();
  j["tamagawa_factor"] = r.tamagawa_factor.get_str();
  j["path_integral_limit"] = r.path_integral_limit.get_str();
  j["rhs_value"] = r.rhs_value.get_str();
  j["verdict"] = r.pass ? "pass" : "fail";
  j["padic_precision"] = r.padic_precision_used;
  j["assumptions"] = assumptions_json(r.assumption_log);
  return j;
}

std::string report_to_text(const TheoremReport& r, const EllipticCurve& E) {
  std::ostringstream os;
  os << "path integral identity check (p = " << r.p << ", n = " << r.n << ")\n";
  os << "curve: [" << E.a1() << "," << E.a2() << "," << E.a3() << "," << E.a4() << "," << E.a6()
     << "], disc = " << E.disc << "\n";
  os << "assumptions:\n" << assumptions_text(r.assumption_log);
  os << "analytic side:\n";
  os << "  v_p(prod g(zeta-1)) = " << r.lhs_valuation << "  =>  |.|_p^{-1} = " << r.lhs_value
     << "\n";
  os << "arithmetic side:\n";
  os << "  reduction factor |E~(F_p)[p^oo]|^2      = " << r.reduction_factor << "\n";
  os << "  Tamagawa factor prod c_v^{(p)} over Y_n = " << r.tamagawa_factor << "\n";
  os << "  path integral limit |Sel(Q_n,E[p^oo])|  = " << r.path_integral_limit << "\n";
  os << "  product                                 = " << r.rhs_value << "\n";
  os << "verdict: " << (r.pass ? "pass" : "FAIL") << "\n";
  if (!r.pass) {
    os << "discrepancy: lhs " << r.lhs_value << " (v = " << r.lhs_valuation << ") vs rhs "
       << r.rhs_value << " (v = " << ord_p(r.rhs_value, mpz_class(r.p)) << ")\n";
  }
  return os.str();
}

nlohmann::ordered_json report_to_json(const KeyLemmaReport& r, const EllipticCurve& E) {
  nlohmann::ordered_json j;
  j["check"] = "selmer_valuation_identity";
  j["curve"] = curve_json(E);
  j["p"] = r.p;
  j["n"] = r.n;
  j["mode"] = r.verdict_mode ? "verdict" : "report-only";
  j["lhs_valuation"] = r.lhs_valuation;
  j["sel_valuation"] = r.sel_valuation;
  j["error_ratio_valuation"] = r.error_ratio_valuation;
  j["residual"] = r.residual;
  if (r.verdict_mode) j["verdict"] = r.pass ? "pass" : "fail";
  j["padic_precision"] = r.padic_precision_used;
  j["assumptions"] = assumptions_json(r.assumption_log);
  return j;
}

std::string report_to_text(const KeyLemmaReport& r, const EllipticCurve& E) {
  std::ostringstream os;
  os << "Selmer valuation identity check (p = " << r.p << ", n = " << r.n << ")\n";
  os << "curve: [" << E.a1() << "," << E.a2() << "," << E.a3() << "," << E.a4() << "," << E.a6()
     << "]\n";
  os << "mode: " << (r.verdict_mode ? "verdict (rank 0, trivial p-torsion)" : "report-only")
     << "\n";
  os << "assumptions:\n" << assumptions_text(r.assumption_log);
  os << "  v_p(prod g(zeta-1))       = " << r.lhs_valuation << "\n";
  os << "  v_p(|Sel(Q_n, E[p^oo])|)  = " << r.sel_valuation << "\n";
  os << "  v_p(|ker g_n|)            = " << r.error_ratio_valuation << "\n";
  os << "  residual                  = " << r.residual << "\n";
  if (r.verdict_mode) os << "verdict: " << (r.pass ? "pass" : "FAIL") << "\n";
  return os.str();
}

}  // namespace ellbf
