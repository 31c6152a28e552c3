#pragma once

#include <gmpxx.h>

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "ellbf/curve.hpp"
#include "ellbf/modsym.hpp"

namespace ellbf {

// Externally supplied arithmetic data for a (curve, p, n) triple.
struct SelmerFixture {
  std::string curve_label;
  std::array<long long, 5> coefficients{};
  long p = 0;
  int n = 0;
  mpz_class sel_p_infty_order = 1;  // |Sel(Q_n, E[p^oo])|
  int rank = 0;                     // rank of E(Q_n)
  mpz_class torsion_p_part = 1;     // |E(Q_n)[p^oo]|
  bool assert_Ep_irreducible = false;
  std::string source;
};

SelmerFixture fixture_from_json(const nlohmann::json& j);
SelmerFixture load_fixture(const std::string& path);
nlohmann::ordered_json fixture_to_json(const SelmerFixture& f);

struct AssumptionCheck {
  std::string name;
  bool ok = true;
  bool warning_only = false;
  std::string detail;
};

// Standing assumptions: p odd prime, good ordinary, semistable, component
// group orders prime to p, fixture consistency; in theorem mode additionally
// rank 0 and trivial p-torsion.  Log-only, never throws.
std::vector<AssumptionCheck> check_assumptions(const EllipticCurve& E, long p, int n,
                                               const SelmerFixture& fix, bool theorem_mode);

struct VerifyConfig {
  int padic_precision = 8;    // M
  mpfr_prec_t float_bits = 128;  // B
  long denom_bound = 10000;   // D
  std::string cache_dir;
  int max_retries = 3;        // precision doublings for the analytic side
};

// v_p of prod_{zeta^{p^n}=1} G_n(zeta - 1); retries with doubled modulus on
// insufficient precision.  M_used, when given, receives the modulus exponent
// that finally certified the valuation.
int lhs_valuation(SymbolEngine& eng, long p, int n, int M, int max_retries, int* M_used = nullptr);

struct RhsFactors {
  mpz_class reduction_factor;     // (p-part of #E~(F_p))^2
  mpz_class tamagawa_factor;      // prod over places of Y_n above bad ell != p
  mpz_class path_integral_limit;  // |Sel(Q_n, E[p^oo])| from the fixture
};

RhsFactors rhs_value(const EllipticCurve& E, long p, int n, const SelmerFixture& fix);

// Number of primes of Q_n above ell (unramified, ell != p), via the order of
// ell in the degree-p^n quotient of (Z/p^{n+1})^x.
int primes_above(long ell, long p, int n);
// Same count by direct enumeration of the Frobenius order (crosscheck).
int primes_above_direct(long ell, long p, int n);

struct TheoremReport {
  long p = 0;
  int n = 0;
  int lhs_valuation = 0;
  mpz_class lhs_value;  // p^{lhs_valuation}
  mpz_class reduction_factor, tamagawa_factor, path_integral_limit;
  mpz_class rhs_value;
  bool pass = false;
  std::vector<AssumptionCheck> assumption_log;
  int padic_precision_used = 0;
};

TheoremReport check_theorem(SymbolEngine& eng, long p, int n, const SelmerFixture& fix,
                            const VerifyConfig& cfg);
TheoremReport check_theorem(const EllipticCurve& E, long p, int n, const SelmerFixture& fix,
                            const VerifyConfig& cfg);

struct KeyLemmaReport {
  long p = 0;
  int n = 0;
  bool verdict_mode = false;  // rank 0 and trivial p-torsion: hard verdict
  int lhs_valuation = 0;
  int sel_valuation = 0;
  int error_ratio_valuation = 0;  // v_p(|ker g_n|) from the product formula
  int residual = 0;               // lhs - sel - error_ratio
  bool pass = false;              // only meaningful in verdict mode
  std::vector<AssumptionCheck> assumption_log;
  int padic_precision_used = 0;
};

KeyLemmaReport check_keylemma(SymbolEngine& eng, long p, int n, const SelmerFixture& fix,
                              const VerifyConfig& cfg);
KeyLemmaReport check_keylemma(const EllipticCurve& E, long p, int n, const SelmerFixture& fix,
                              const VerifyConfig& cfg);

nlohmann::ordered_json report_to_json(const TheoremReport& r, const EllipticCurve& E);
std::string report_to_text(const TheoremReport& r, const EllipticCurve& E);
nlohmann::ordered_json report_to_json(const KeyLemmaReport& r, const EllipticCurve& E);
std::string report_to_text(const KeyLemmaReport& r, const EllipticCurve& E);

}  // namespace ellbf
