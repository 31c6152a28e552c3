#pragma once

#include <gmpxx.h>

#include <optional>
#include <vector>

#include "ellbf/padic.hpp"

namespace ellbf {

// Polynomial over Z/p^precision in the Iwasawa variable T.  When
// modulus_level = n is set the element lives in Z/p^M [T] / omega_n(T) with
// omega_n = (1+T)^{p^n} - 1, and deg < p^n is maintained.  Trailing zero
// coefficients are trimmed.
struct IwasawaElement {
  long p = 0;
  int precision = 0;
  std::vector<mpz_class> coeffs;  // coeffs[i] multiplies T^i
  std::optional<int> modulus_level;

  long degree() const { return static_cast<long>(coeffs.size()) - 1; }
  bool is_zero() const { return coeffs.empty(); }
  mpz_class at_zero() const { return coeffs.empty() ? mpz_class(0) : coeffs[0]; }
};

IwasawaElement make_iwasawa(long p, int precision, std::vector<mpz_class> coeffs,
                            std::optional<int> modulus_level = std::nullopt);

// (1+T)^{p^n} - 1 reduced mod p^M; monic of degree p^n.
IwasawaElement omega_poly(int n, long p, int M);

IwasawaElement iw_add(const IwasawaElement& a, const IwasawaElement& b);
IwasawaElement iw_scale(const IwasawaElement& a, const mpz_class& c);
IwasawaElement iw_mul(const IwasawaElement& a, const IwasawaElement& b);

// Remainder of a modulo a monic polynomial f, coefficientwise mod p^M.
IwasawaElement iw_mod(const IwasawaElement& a, const IwasawaElement& f_monic);

struct NewtonInvariants {
  int mu = 0;
  long lambda = 0;
  bool operator==(const NewtonInvariants&) const = default;
};

// mu = minimal coefficient valuation, lambda = first index attaining it.
// Throws precision_error when g vanishes mod p^M.
NewtonInvariants newton_invariants(const IwasawaElement& g);

// Sylvester resultant over Z/p^M; f must be monic.  Equals
// prod_{f(theta)=0} g(theta) mod p^M.  Exact: elimination only ever divides
// by units, so no precision is lost.
PadicInt resultant_mod(const IwasawaElement& f_monic, const IwasawaElement& g);

// v_p( prod_{zeta^{p^n}=1} g(zeta - 1) ), computed as v(Res(omega_n, g)).
// Throws precision_error (suggesting a doubled modulus) when the resultant
// vanishes mod p^M.
int product_valuation(const IwasawaElement& g, int n);

}  // namespace ellbf
