#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

namespace ellbf {

// p-adic valuation of a nonzero integer.
long ord_p(const mpz_class& x, const mpz_class& p);

// Largest power of p dividing x (1 if coprime); x != 0.
mpz_class p_part(const mpz_class& x, const mpz_class& p);

mpz_class powmod(const mpz_class& base, const mpz_class& exp, const mpz_class& mod);
mpz_class invmod(const mpz_class& a, const mpz_class& mod);

// Legendre symbol (a/p) for odd prime p.
int legendre(const mpz_class& a, const mpz_class& p);

bool is_prime(const mpz_class& n);

// Prime factorization, ascending primes.  Trial division with a Pollard rho
// fallback; intended for desk-scale discriminants.
std::vector<std::pair<mpz_class, int>> factor(const mpz_class& n);

std::vector<long> primes_up_to(long bound);

// true iff n == p^k for some k >= 0.
bool is_p_power(const mpz_class& n, const mpz_class& p);

// Multiplicative order of a modulo m (gcd(a,m) = 1).
long mul_order(const mpz_class& a, const mpz_class& m);

// p^k as mpz.
mpz_class pow_p(long p, int k);

}  // namespace ellbf
