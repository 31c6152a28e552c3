#include "ellbf/padic.hpp"

#include "ellbf/errors.hpp"
#include "ellbf/numutil.hpp"

namespace ellbf {

mpz_class PadicInt::modulus() const { return pow_p(p, precision); }

PadicInt make_padic(long p, int precision, const mpz_class& value) {
  if (precision < 1) throw domain_error("make_padic: precision must be >= 1");
  PadicInt x;
  x.p = p;
  x.precision = precision;
  mpz_class q = pow_p(p, precision);
  x.residue = value % q;
  if (x.residue < 0) x.residue += q;
  return x;
}

std::optional<int> valuation(const PadicInt& x) {
  if (x.residue == 0) return std::nullopt;
  long v = ord_p(x.residue, x.p);
  if (v >= x.precision) return std::nullopt;  // cannot happen for reduced residues
  return static_cast<int>(v);
}

PadicInt hensel_unit_root(const mpz_class& a_p, long p, int M) {
  if (mpz_divisible_ui_p(a_p.get_mpz_t(), static_cast<unsigned long>(p)))
    throw not_ordinary_error("hensel_unit_root: p divides a_p");
  mpz_class q = pow_p(p, M);
  // Newton iteration for f(x) = x^2 - a_p x + p starting at x = a_p mod p;
  // f'(x) = 2x - a_p stays a unit.
  mpz_class x = a_p % p;
  if (x < 0) x += p;
  for (int k = 0; k < M + 2; ++k) {
    mpz_class f = (x * x - a_p * x + p) % q;
    mpz_class df = (2 * x - a_p) % q;
    x = (x - f * invmod(df, q)) % q;
    if (x < 0) x += q;
  }
  PadicInt r = make_padic(p, M, x);
  if ((r.residue * r.residue - a_p * r.residue + p) % q != 0)
    throw error("hensel_unit_root: iteration failed to converge");
  return r;
}

PadicInt teichmuller(const mpz_class& a, long p, int M) {
  if (mpz_divisible_ui_p(a.get_mpz_t(), static_cast<unsigned long>(p)))
    throw domain_error("teichmuller: p divides a");
  mpz_class q = pow_p(p, M);
  mpz_class x = a % q;
  if (x < 0) x += q;
  // x -> x^p gains one digit of agreement with omega(a) per step.
  for (int k = 0; k < M + 1; ++k) x = powmod(x, p, q);
  return make_padic(p, M, x);
}

namespace {
void require_compatible(const PadicInt& a, const PadicInt& b) {
  if (a.p != b.p || a.precision != b.precision)
    throw domain_error("p-adic arithmetic on incompatible operands");
}
}  // namespace

PadicInt padic_mul(const PadicInt& a, const PadicInt& b) {
  require_compatible(a, b);
  return make_padic(a.p, a.precision, a.residue * b.residue);
}

PadicInt padic_add(const PadicInt& a, const PadicInt& b) {
  require_compatible(a, b);
  return make_padic(a.p, a.precision, a.residue + b.residue);
}

PadicInt padic_inv(const PadicInt& a) {
  return make_padic(a.p, a.precision, invmod(a.residue, a.modulus()));
}

PadicInt padic_pow(const PadicInt& a, long e) {
  PadicInt base = e < 0 ? padic_inv(a) : a;
  unsigned long n = static_cast<unsigned long>(e < 0 ? -e : e);
  return make_padic(a.p, a.precision, powmod(base.residue, mpz_class(n), a.modulus()));
}

OneUnitLog::OneUnitLog(long p, int n) : p_(p), n_(n), q_(pow_p(p, n + 1)) {
  mpz_class pn = pow_p(p, n);
  mpz_class x = 1;
  mpz_class g = 1 + p;
  for (long k = 0; k < pn; ++k) {
    table_.emplace(x.get_si(), k);
    x = x * g % q_;
  }
}

long OneUnitLog::log_of(const mpz_class& a) const {
  mpz_class u = a % q_;
  if (u < 0) u += q_;
  mpz_class gcd;
  mpz_gcd_ui(gcd.get_mpz_t(), u.get_mpz_t(), static_cast<unsigned long>(p_));
  if (gcd != 1) throw domain_error("OneUnitLog: argument not a unit");
  // Strip the Teichmueller part.
  mpz_class omega = teichmuller(u, p_, n_ + 1).residue;
  mpz_class one_unit = u * invmod(omega, q_) % q_;
  auto it = table_.find(one_unit.get_si());
  if (it == table_.end()) throw error("OneUnitLog: inconsistent table");
  return it->second;
}

}  // namespace ellbf
