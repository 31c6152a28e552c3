#pragma once

#include <gmpxx.h>

#include <optional>
#include <unordered_map>

namespace ellbf {

// Element of Z_p known modulo p^precision (absolute precision, no relative
// tracking).  residue is always reduced to [0, p^precision).
struct PadicInt {
  long p = 0;
  int precision = 0;
  mpz_class residue;

  mpz_class modulus() const;
};

PadicInt make_padic(long p, int precision, const mpz_class& value);

// p-adic valuation of x: the exponent v with p^v || residue, or nullopt when
// the residue vanishes mod p^M (valuation only known to be >= M).
std::optional<int> valuation(const PadicInt& x);

// Unit root alpha of X^2 - a_p X + p, alpha = a_p (mod p), to precision M.
PadicInt hensel_unit_root(const mpz_class& a_p, long p, int M);

// Teichmueller lift: the (p-1)-st root of unity congruent to a mod p.
PadicInt teichmuller(const mpz_class& a, long p, int M);

PadicInt padic_mul(const PadicInt& a, const PadicInt& b);
PadicInt padic_add(const PadicInt& a, const PadicInt& b);
PadicInt padic_inv(const PadicInt& a);
PadicInt padic_pow(const PadicInt& a, long e);  // e may be negative for units

// Discrete logarithms in the 1-unit part of (Z/p^{n+1})^x.  Every unit a
// factors as omega(a) * (1+p)^k with k in Z/p^n; log_of(a) returns that k.
class OneUnitLog {
public:
  OneUnitLog(long p, int n);
  long log_of(const mpz_class& a) const;
  long p() const { return p_; }
  int level() const { return n_; }
  const mpz_class& modulus() const { return q_; }

private:
  long p_;
  int n_;
  mpz_class q_;  // p^{n+1}
  std::unordered_map<long, long> table_;
};

}  // namespace ellbf
