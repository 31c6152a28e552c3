#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <set>
#include <string>

#include "ellbf/bigfloat.hpp"
#include "ellbf/curve.hpp"
#include "ellbf/iwasawa.hpp"
#include "ellbf/padic.hpp"

namespace ellbf {

struct Periods {
  Real omega_plus;      // least positive real period of dx/(2y + a1 x + a3)
  int real_components;  // 2 iff disc > 0
};

struct ModularSymbol {
  mpq_class r;
  mpq_class value_plus;  // [r]^+, normalized so [0]^+ = L(E,1)/omega_plus
};

// Group-ring element over Z/p^M indexed by (Z/p^{level+1})^x.  level = -1 is
// the degenerate bottom layer (trivial group, single key 1) used by the
// unit-root stabilization.
struct ThetaElement {
  long p = 0;
  int level = 0;
  int precision = 0;
  std::map<long, mpz_class> coeffs;
};

struct DirichletCharacter {
  long p = 0;
  int n = 0;        // modulus p^{n+1}
  long order = 0;   // (p-1) p^n
  long index = 0;   // chi(g^k) = zeta_order^{index k} for the chosen generator g
  long generator = 0;
  std::map<long, long> exponents;  // a -> e with chi(a) = zeta_order^e
  Complex gauss_sum;
  bool primitive = false;
};

DirichletCharacter make_character(long p, int n, long index, mpfr_prec_t bits);

// Numerical engine for plus modular symbols of a semistable curve.
//
// [r]^+ is computed from period integrals of the newform: the path {i oo, r}
// is transported by an explicit gamma in Gamma_0(N) carrying the cusp 0 to r
// (possible whenever gcd(den(r), N) = 1), which turns the symbol into a
// difference of two q-expansion sums at interior points of balanced height
// 1/|C|; evaluations additionally use the Fricke involution when flipping
// raises the height.  The float result is promoted to an exact rational by
// continued-fraction reconstruction with denominator bound D.
class SymbolEngine {
public:
  struct Options {
    mpfr_prec_t float_bits = 128;  // B
    long denom_bound = 10000;      // D
    std::string cache_dir;         // empty: no persistent caches
  };

  // Used by determinism tests: vary the transport matrix and base height.
  struct PathOptions {
    long k_shift = 0;        // replace k by k + k_shift * den(r)
    long height_num = 1;     // base height = (height_num/height_den)/|C|
    long height_den = 1;
  };

  SymbolEngine(const EllipticCurve& E, Options opt);
  ~SymbolEngine();

  const EllipticCurve& curve() const { return E_; }
  const Options& options() const { return opt_; }
  long conductor() const { return N_; }

  const Periods& periods();
  int fricke_sign();

  mpq_class symbol_plus(const mpq_class& r);
  mpq_class symbol_plus_with(const mpq_class& r, const PathOptions& path);
  ModularSymbol modular_symbol(const mpq_class& r);

  // Mazur-Tate element of level n >= -1 (coefficients [a/p^{n+1}]^+ mod p^M).
  ThetaElement theta_element(long p, int n, int M);

  long long a_p(long p);

private:
  Complex S_sum(const Real& x, const Real& y, double y_lower);
  Complex S_eval(const mpq_class& x, const mpq_class& y);
  Complex S_base();  // S(i/sqrt(N))
  Complex lambda_value(const mpq_class& r, const PathOptions& path);
  Real f_on_axis(const Real& y, double y_lower);  // f(iy), real
  long terms_needed(double y) const;
  mpq_class reconstruct(const Real& v) const;
  void load_symbol_file(const mpz_class& den);
  void flush_symbol_cache();

  EllipticCurve E_;
  Options opt_;
  mpfr_prec_t W_;  // working precision
  AnTable an_;
  long N_;
  std::optional<Periods> periods_;
  std::optional<int> wN_;
  std::optional<Complex> s_base_;
  std::map<mpq_class, mpq_class> symbols_;
  std::set<mpz_class> loaded_dens_;
  std::set<mpz_class> dirty_dens_;
};

// Natural projection pi: level n -> level n-1 (sum over fibers).
ThetaElement theta_project(const ThetaElement& th);

// Norm-inflation nu: level n -> level n+1 (constant on fibers).
ThetaElement theta_inflate(const ThetaElement& th);

// c1 * t1 + c2 * t2 coefficientwise (same level and precision).
ThetaElement theta_combine(const mpz_class& c1, const ThetaElement& t1, const mpz_class& c2,
                           const ThetaElement& t2);

// e_r * theta with e_r = (1/(p-1)) sum_delta omega^{-r}(delta) delta; a full
// group-ring element again.
ThetaElement branch_component(const ThetaElement& th, int r);

// The omega^r-branch written as a polynomial in T = gamma_0 - 1 (gamma_0 the
// 1-unit 1+p): coefficients of e_r * theta on the transversal (1+p)^j.
IwasawaElement project_branch(const ThetaElement& th, int r);

// Unnormalized branch map sigma_a -> omega^r(a) gamma^{k(a)}; equals
// (p-1) * project_branch.  This is the normalization pinned down by the
// interpolation contract of the stabilized L-approximant.
IwasawaElement branch_polynomial(const ThetaElement& th, int r);

// G_n: the level-n truncation of the p-adic L-function,
//   G_n = branch_polynomial( alpha^{-(n+1)} theta_n - alpha^{-(n+2)} nu(theta_{n-1}), r = 0 )
// reduced mod (p^M, omega_n).  Satisfies G_n(0) = (1 - 1/alpha)^2 [0]^+.
IwasawaElement stabilized_Lp(SymbolEngine& eng, long p, int n, int M);

}  // namespace ellbf
