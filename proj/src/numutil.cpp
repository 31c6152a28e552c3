#include "ellbf/numutil.hpp"

#include <algorithm>
#include <map>

#include "ellbf/errors.hpp"

namespace ellbf {

long ord_p(const mpz_class& x, const mpz_class& p) {
  if (x == 0) throw domain_error("ord_p: zero argument");
  mpz_class q;
  return static_cast<long>(mpz_remove(q.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t()));
}

mpz_class p_part(const mpz_class& x, const mpz_class& p) {
  if (x == 0) throw domain_error("p_part: zero argument");
  mpz_class q;
  long v = static_cast<long>(mpz_remove(q.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t()));
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(v));
  return r;
}

mpz_class powmod(const mpz_class& base, const mpz_class& exp, const mpz_class& mod) {
  mpz_class r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return r;
}

mpz_class invmod(const mpz_class& a, const mpz_class& mod) {
  mpz_class r;
  if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), mod.get_mpz_t()))
    throw domain_error("invmod: argument not invertible");
  return r;
}

int legendre(const mpz_class& a, const mpz_class& p) {
  return mpz_legendre(a.get_mpz_t(), p.get_mpz_t());
}

bool is_prime(const mpz_class& n) {
  return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

namespace {

mpz_class pollard_rho(const mpz_class& n) {
  // Brent's cycle variant; n odd composite, not a prime power of small primes.
  for (unsigned long c = 1;; ++c) {
    mpz_class x = 2, y = 2, d = 1;
    while (d == 1) {
      x = (x * x + c) % n;
      y = (y * y + c) % n;
      y = (y * y + c) % n;
      mpz_class diff = x - y;
      if (diff < 0) diff = -diff;
      if (diff == 0) break;
      mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
    }
    if (d != 1 && d != n) return d;
  }
}

void factor_into(const mpz_class& n, std::map<mpz_class, int>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out[n] += 1;
    return;
  }
  mpz_class d = pollard_rho(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace

std::vector<std::pair<mpz_class, int>> factor(const mpz_class& n_in) {
  if (n_in == 0) throw domain_error("factor: zero argument");
  mpz_class n = n_in < 0 ? mpz_class(-n_in) : n_in;
  std::map<mpz_class, int> acc;
  for (long q : {2L, 3L, 5L, 7L, 11L, 13L}) {
    while (mpz_divisible_ui_p(n.get_mpz_t(), q)) {
      acc[q] += 1;
      n /= q;
    }
  }
  for (long q = 17; q <= 100000 && n > 1; q += 2) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), q)) {
      while (mpz_divisible_ui_p(n.get_mpz_t(), q)) {
        acc[q] += 1;
        n /= q;
      }
    }
  }
  if (n > 1) factor_into(n, acc);
  return {acc.begin(), acc.end()};
}

std::vector<long> primes_up_to(long bound) {
  std::vector<long> out;
  if (bound < 2) return out;
  std::vector<bool> comp(static_cast<size_t>(bound) + 1, false);
  for (long i = 2; i <= bound; ++i) {
    if (!comp[i]) {
      out.push_back(i);
      for (long j = 2 * i; j <= bound; j += i) comp[j] = true;
    }
  }
  return out;
}

bool is_p_power(const mpz_class& n, const mpz_class& p) {
  if (n <= 0) return false;
  mpz_class m = n;
  while (m > 1) {
    if (!mpz_divisible_p(m.get_mpz_t(), p.get_mpz_t())) return false;
    m /= p;
  }
  return true;
}

long mul_order(const mpz_class& a, const mpz_class& m) {
  mpz_class x = a % m;
  if (x < 0) x += m;
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  if (g != 1) throw domain_error("mul_order: argument not coprime to modulus");
  mpz_class y = x;
  for (long k = 1;; ++k) {
    if (y == 1) return k;
    y = y * x % m;
  }
}

mpz_class pow_p(long p, int k) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k));
  return r;
}

}  // namespace ellbf
